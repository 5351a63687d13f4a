"""Synthetic signal builders shared across the test suite."""

import numpy as np

from dialogsep import AudioClip, Stems


def sine(freq, seconds, sample_rate, amp=0.5, phase=0.0):
    t = np.arange(int(round(seconds * sample_rate))) / sample_rate
    return amp * np.sin(2.0 * np.pi * freq * t + phase)


def stereo_clip(left, right=None, sample_rate=44100):
    right = left if right is None else right
    return AudioClip(np.stack([left, right], axis=1), sample_rate)


def tone_stems(
    seconds=3.0,
    sample_rate=44100,
    dialog_freq=500.0,
    bg_freq=6000.0,
    noise_db=-40.0,
    active_fraction=1.0,
    seed=0,
):
    """Dialog tone (gated on for the leading fraction) over a background tone
    plus faint noise; mixture is the exact sum."""
    n = int(round(seconds * sample_rate))
    t = np.arange(n) / sample_rate
    gate = (t < seconds * active_fraction).astype(np.float64)
    dlg = 0.3 * np.sin(2.0 * np.pi * dialog_freq * t) * gate
    rng = np.random.default_rng(seed)
    bg = 0.1 * np.sin(2.0 * np.pi * bg_freq * t)
    bg = bg + 10.0 ** (noise_db / 20.0) * rng.standard_normal(n)
    x = np.stack([dlg, 0.8 * dlg], axis=1)
    b = np.stack([bg, bg], axis=1)
    return Stems(
        mixture=AudioClip(x + b, sample_rate),
        dialog=AudioClip(x, sample_rate),
        background=AudioClip(b, sample_rate),
    )
