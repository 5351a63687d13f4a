"""Top-level acceptance checks, one test per guaranteed property.

Run with -v to get one pass/fail line per property. Everything here is
synthetic and seeded; no external data or models are involved.
"""

import json
import time

import numpy as np
import pytest

from dialogsep import (
    IrmConfig,
    RemixSpec,
    StftConfig,
    decompose,
    evaluate_item,
    integrated_loudness,
    istft,
    make_anchor,
    make_hidden_reference,
    make_reference_condition,
    post_screen,
    prepare_condition,
    run_schedule,
    separate_oracle,
    si_sdr,
    si_sir,
    stft,
)
from dialogsep.audio import AudioClip
from dialogsep.cli import main
from dialogsep.loudness import LoudnessConfig
from dialogsep.mushra import HIDDEN_REFERENCE, RatingRecord, t_interval_half_width
from dialogsep.remix import MAX_ATTENUATION_DB
from dialogsep.schedule import CONTINUE, DECAY_LR, STOP, STOP_CAP, STOP_EARLY
from dialogsep.wavio import save_wav

from helpers import sine, stereo_clip, tone_stems


def test_si_sdr_scale_invariance():
    """Scaling the estimate by 0.1x, 1x, or 10x never moves SI-SDR."""
    rng = np.random.default_rng(2024)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(16, 4096))
        est = rng.standard_normal(n)
        ref = rng.standard_normal(n)
        base = si_sdr(est, ref)
        for c in (0.1, 1.0, 10.0):
            worst = max(worst, abs(si_sdr(c * est, ref) - base))
    elapsed = time.perf_counter() - started
    assert worst < 1e-9
    assert elapsed < 1.0


def _normal_equations(est, s, b):
    """Exact-integer 2x2 Gram solve for the projection onto span{s, b}."""
    g_ss, g_sb, g_bb = int(s @ s), int(s @ b), int(b @ b)
    det = g_ss * g_bb - g_sb * g_sb
    r_s, r_b = int(est @ s), int(est @ b)
    c_s = (r_s * g_bb - g_sb * r_b) / det
    c_b = (g_ss * r_b - r_s * g_sb) / det
    projected = c_s * s + c_b * b
    alpha = (est @ s) / (s @ s)
    s_target = alpha * s
    return s_target, projected - s_target, est - projected


def test_projection_matches_normal_equations():
    """1000 integer cases: decomposition equals a hand Gram solve; SDR <= SIR."""
    rng = np.random.default_rng(7)
    accepted = 0
    while accepted < 1000:
        n = int(rng.integers(2, 9))
        est = rng.integers(-3, 4, n).astype(float)
        s = rng.integers(-3, 4, n).astype(float)
        b = rng.integers(-3, 4, n).astype(float)
        g_ss, g_sb, g_bb = int(s @ s), int(s @ b), int(b @ b)
        if not np.any(est) or g_ss == 0 or g_ss * g_bb - g_sb * g_sb == 0:
            continue
        accepted += 1
        s_target, e_interf, e_artif = _normal_equations(est, s, b)
        parts = decompose(est, s, b)
        assert np.max(np.abs(parts.s_target - s_target)) < 1e-9
        assert np.max(np.abs(parts.e_interf - e_interf)) < 1e-9
        assert np.max(np.abs(parts.e_artif - e_artif)) < 1e-9
        assert si_sdr(est, s) <= si_sir(est, s, b) + 1e-9


def test_hand_worked_metric_values():
    assert si_sdr([1.0, 1.0], [1.0, 0.0]) == pytest.approx(0.0, abs=1e-9)
    value = si_sir([1.0, 0.5], [1.0, 0.0], [0.0, 1.0])
    assert value == pytest.approx(6.021, abs=1e-3)


def test_stft_reconstruction_100_clips():
    rng = np.random.default_rng(99)
    sr = 16000
    config = StftConfig()
    worst = 0.0
    for _ in range(100):
        seconds = float(rng.uniform(0.5, 5.0))
        n = int(seconds * sr)
        clip = AudioClip(rng.standard_normal((n, 2)), sr)
        back = istft(stft(clip, config))
        worst = max(worst, float(np.max(np.abs(back.samples - clip.samples))))
    assert worst < 1e-6


def test_irm_oracle_on_disjoint_tones():
    started = time.perf_counter()
    stems = tone_stems(seconds=4.0, sample_rate=44100)
    result = separate_oracle(stems, IrmConfig())
    report = evaluate_item(stems, result.dialog_estimate, item_id="tones")
    elapsed = time.perf_counter() - started
    assert report.si_siri > 25.0
    assert report.si_sdri > 10.0
    assert report.si_sdr_out >= report.si_sdr_in
    assert elapsed < 10.0


def test_loudness_meter_conformance():
    """Full-scale 997 Hz left-only sine reads -3.01 LUFS; gain-linear to
    0.01 LU over +-40 dB."""
    for sr in (48000, 44100):
        tone = sine(997.0, 2.0, sr, amp=1.0)
        clip = stereo_clip(tone, np.zeros_like(tone), sr)
        assert integrated_loudness(clip) == pytest.approx(-3.01, abs=0.1)

    base = stereo_clip(sine(997.0, 2.0, 48000, amp=0.05), sample_rate=48000)
    reference = integrated_loudness(base)
    for gain_db in (-40.0, -20.0, 20.0, 40.0):
        scaled = base.with_samples(base.samples * 10 ** (gain_db / 20.0))
        assert integrated_loudness(scaled) - reference == pytest.approx(gain_db, abs=0.01)


def test_remix_protocol_fixpoint():
    """A perfect dialog estimate recovers the 12 dB reference attenuation and
    all rendered conditions land on -23 LUFS."""
    stems = tone_stems(seconds=4.0, sample_rate=44100, active_fraction=0.5)
    spec = RemixSpec()
    ungated = LoudnessConfig(gating=False)

    rendered = [
        prepare_condition(stems, stems.dialog, spec, item_id="t", condition_id="perfect"),
        make_hidden_reference(stems, spec, item_id="t"),
        make_anchor(make_reference_condition(stems, spec), spec.target_lufs, item_id="t"),
    ]
    assert rendered[0].background_attenuation_db == pytest.approx(12.0, abs=0.1)
    for item in rendered:
        assert integrated_loudness(item.signal, ungated) == pytest.approx(-23.0, abs=0.1)

    # adversarial estimates must stay inside the attenuation clamp
    silent = prepare_condition(stems, stems.mixture, spec, item_id="t", condition_id="s")
    assert silent.background_attenuation_db == MAX_ATTENUATION_DB
    blown = stems.dialog.with_samples(stems.dialog.samples - 1e7 * stems.background.samples)
    huge = prepare_condition(stems, blown, spec, item_id="t", condition_id="h")
    assert huge.background_attenuation_db <= MAX_ATTENUATION_DB


def test_schedule_trace_and_cap():
    losses = [1.0] + [1.1] * 10
    decisions = run_schedule(losses)
    kinds = [d.kind for d in decisions]
    assert kinds == [CONTINUE] * 5 + [DECAY_LR] + [CONTINUE] * 4 + [STOP]
    assert decisions[5].lr_factor == pytest.approx(0.3)
    assert decisions[-1].reason == STOP_EARLY

    # an always-improving run stops only at the epoch cap
    improving = [1.0 / (epoch + 1) for epoch in range(150)]
    decisions = run_schedule(improving)
    assert len(decisions) == 100
    assert decisions[-1].kind == STOP
    assert decisions[-1].reason == STOP_CAP


def test_mushra_statistics_and_screening():
    half = t_interval_half_width(float(np.std(np.arange(80, 95, 2), ddof=1)), 8)
    assert half == pytest.approx(4.096, abs=0.01)

    conditions = [HIDDEN_REFERENCE, "anchor_lp3500", "m1", "m2"]
    records = []
    for k in range(14):
        for item in ("i1", "i2"):
            for cond in conditions:
                if cond == HIDDEN_REFERENCE:
                    score = 90
                elif k < 6 and item == "i1" and cond == "m1":
                    score = 99  # above the hidden reference
                else:
                    score = 55
                records.append(RatingRecord(f"p{k:02d}", item, cond, score))
    result = post_screen(records)
    assert len(result.kept) == 8
    assert len(result.excluded) == 6


def test_pipeline_determinism(tmp_path):
    """prep and session generation are byte-identical across reruns."""
    src = tmp_path / "src"
    src.mkdir()
    stems = tone_stems(seconds=5.0, sample_rate=8000, active_fraction=0.4)
    entry = {"item_id": "it"}
    for name in ("mixture", "dialog", "background"):
        save_wav(getattr(stems, name), src / f"{name}.wav")
        entry[name] = f"{name}.wav"
    manifest = src / "items.json"
    manifest.write_text(json.dumps({"items": [entry]}))

    prep_bytes = []
    for run in ("p1", "p2"):
        out = tmp_path / run
        assert main(["prep", "--manifest", str(manifest), "--out", str(out),
                     "--chunk-seconds", "2", "--sample-rate", "8000", "--seed", "3"]) == 0
        prep_bytes.append((out / "dataset_manifest.json").read_bytes())
    assert prep_bytes[0] == prep_bytes[1]

    estimates = tmp_path / "est"
    estimates.mkdir()
    (estimates / "it.wav").write_bytes((src / "dialog.wav").read_bytes())
    remix_out = tmp_path / "remix"
    assert main(["remix", "--manifest", str(manifest), "--out", str(remix_out),
                 "--estimates", str(estimates)]) == 0

    session_bytes = []
    for run in ("m1", "m2"):
        out = tmp_path / run
        assert main(["mushra-gen", "--remix-manifest", str(remix_out / "remix_manifest.json"),
                     "--out", str(out), "--seed", "9", "--num-listeners", "3"]) == 0
        session_bytes.append(
            (out / "session.json").read_bytes() + (out / "session_key.json").read_bytes()
        )
    assert session_bytes[0] == session_bytes[1]
