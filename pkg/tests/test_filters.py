import numpy as np
import pytest

from dialogsep import AudioClip, design_anchor_lowpass, lowpass_3k5
from dialogsep.filters import ANCHOR_NUM_TAPS, apply_fir

from helpers import sine, stereo_clip


def _tone_gain_db(freq, sr=44100):
    clip = stereo_clip(sine(freq, 1.0, sr), sample_rate=sr)
    out = lowpass_3k5(clip)
    mid = slice(sr // 4, 3 * sr // 4)
    rms_in = np.sqrt(np.mean(clip.samples[mid, 0] ** 2))
    rms_out = np.sqrt(np.mean(out.samples[mid, 0] ** 2))
    return 20.0 * np.log10(rms_out / max(rms_in, 1e-30))


def test_taps_are_symmetric_linear_phase():
    taps = design_anchor_lowpass(44100)
    assert len(taps) == ANCHOR_NUM_TAPS
    assert np.allclose(taps, taps[::-1])
    assert np.sum(taps) == pytest.approx(1.0, abs=1e-6)  # unity DC gain


def test_anchor_response_shape():
    assert abs(_tone_gain_db(1000.0)) < 0.1           # passband flat
    assert _tone_gain_db(3500.0) == pytest.approx(-6.0, abs=0.5)  # -6 dB cutoff
    assert _tone_gain_db(7000.0) < -60.0              # octave above: crushed


def test_anchor_response_at_48k():
    assert _tone_gain_db(3500.0, sr=48000) == pytest.approx(-6.0, abs=0.5)
    assert _tone_gain_db(7000.0, sr=48000) < -60.0


def test_group_delay_compensated():
    # an impulse stays put
    sr = 44100
    n = 4096
    samples = np.zeros((n, 2))
    samples[n // 2, :] = 1.0
    out = apply_fir(AudioClip(samples, sr), design_anchor_lowpass(sr))
    assert out.num_samples == n
    assert np.argmax(np.abs(out.samples[:, 0])) == n // 2
    assert np.argmax(np.abs(out.samples[:, 1])) == n // 2


def test_apply_fir_preserves_length_and_identity():
    rng = np.random.default_rng(0)
    clip = AudioClip(rng.standard_normal((1000, 2)), 44100)
    out = apply_fir(clip, np.array([1.0]))
    assert np.allclose(out.samples, clip.samples, atol=1e-12)


def test_low_rate_rejected():
    clip = stereo_clip(np.zeros(100), sample_rate=7000)
    with pytest.raises(ValueError, match="too low"):
        lowpass_3k5(clip)
