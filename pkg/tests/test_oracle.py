import numpy as np
import pytest

from dialogsep import (
    IrmConfig,
    Spectrogram,
    StftConfig,
    evaluate_item,
    irm_mask,
    separate_oracle,
    stft,
)

from helpers import tone_stems


def _spec_from(bins, cfg, sr=8000, length=256):
    return Spectrogram(bins, cfg, sr, length)


def test_mask_hand_value():
    cfg = StftConfig(window_length=8)
    shape = (2, 3, cfg.num_bins)
    x = _spec_from(np.full(shape, 2.0 + 0.0j), cfg)
    b = _spec_from(np.full(shape, 1.0 + 0.0j), cfg)
    mask = irm_mask(x, b)
    # |X|^2 / (|X|^2 + |B|^2) = 4/5
    assert mask == pytest.approx(np.full(shape, 0.8), abs=1e-9)


def test_mask_exponent_one():
    cfg = StftConfig(window_length=8)
    shape = (2, 2, cfg.num_bins)
    x = _spec_from(np.full(shape, 2.0 + 0.0j), cfg)
    b = _spec_from(np.full(shape, 1.0 + 0.0j), cfg)
    mask = irm_mask(x, b, IrmConfig(stft=cfg, exponent=1.0))
    assert mask == pytest.approx(np.full(shape, 2.0 / 3.0), abs=1e-9)


def test_mask_bounds_and_phase_invariance():
    cfg = StftConfig(window_length=16)
    rng = np.random.default_rng(21)
    shape = (2, 5, cfg.num_bins)
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    b = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    mask = irm_mask(_spec_from(x, cfg), _spec_from(b, cfg))
    assert np.all(mask >= 0.0) and np.all(mask <= 1.0)
    # rotating phases leaves the magnitude mask alone
    rotated = irm_mask(_spec_from(x * np.exp(0.7j), cfg), _spec_from(b * np.exp(-1.1j), cfg))
    assert mask == pytest.approx(rotated, abs=1e-12)


def test_mask_shape_mismatch_rejected():
    cfg = StftConfig(window_length=8)
    x = _spec_from(np.zeros((2, 3, cfg.num_bins), dtype=complex), cfg)
    b = _spec_from(np.zeros((2, 4, cfg.num_bins), dtype=complex), cfg)
    with pytest.raises(ValueError, match="shapes differ"):
        irm_mask(x, b)


def test_config_validation():
    with pytest.raises(ValueError):
        IrmConfig(exponent=0.0)
    with pytest.raises(ValueError):
        IrmConfig(floor=0.0)


def test_estimates_sum_to_mixture():
    stems = tone_stems(seconds=1.5)
    result = separate_oracle(stems)
    total = result.dialog_estimate.samples + result.background_estimate.samples
    assert np.max(np.abs(total - stems.mixture.samples)) < 1e-6


def test_disjoint_tones_separate_cleanly():
    stems = tone_stems(seconds=3.0, dialog_freq=500.0, bg_freq=6000.0, noise_db=-40.0)
    result = separate_oracle(stems)
    report = evaluate_item(stems, result.dialog_estimate, item_id="tones")
    assert report.si_siri > 25.0
    assert report.si_sdri > 10.0
    assert report.si_sdr_out >= report.si_sdr_in


def test_silent_background_passes_mixture_through():
    stems = tone_stems(seconds=1.0)
    silent_bg = stems.background.with_samples(np.zeros_like(stems.background.samples))
    silent_stems = type(stems)(mixture=stems.dialog, dialog=stems.dialog, background=silent_bg)
    result = separate_oracle(silent_stems)
    assert np.max(np.abs(result.dialog_estimate.samples - stems.dialog.samples)) < 1e-6
    assert np.max(np.abs(result.background_estimate.samples)) < 1e-6
