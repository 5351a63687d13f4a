"""Linear-phase FIR filtering, including the 3.5 kHz listening-test anchor."""

from __future__ import annotations

import numpy as np
from scipy import signal

from .audio import AudioClip

ANCHOR_CUTOFF_HZ = 3500.0
ANCHOR_NUM_TAPS = 255
_ANCHOR_STOPBAND_DB = 80.0


def design_anchor_lowpass(sample_rate: int) -> np.ndarray:
    """Kaiser-designed low-pass, -6 dB at 3.5 kHz, odd length for exact
    group-delay compensation."""
    beta = signal.kaiser_beta(_ANCHOR_STOPBAND_DB)
    return signal.firwin(ANCHOR_NUM_TAPS, ANCHOR_CUTOFF_HZ, fs=sample_rate, window=("kaiser", beta))


def apply_fir(clip: AudioClip, taps: np.ndarray) -> AudioClip:
    """Zero-phase application of a symmetric odd-length FIR: convolve and
    shift back by the group delay, preserving length."""
    delay = (len(taps) - 1) // 2
    n = clip.num_samples
    out = np.empty_like(clip.samples)
    for c in range(2):
        full = signal.fftconvolve(clip.samples[:, c], taps, mode="full")
        out[:, c] = full[delay : delay + n]
    return clip.with_samples(out)


def lowpass_3k5(clip: AudioClip) -> AudioClip:
    """3.5 kHz low-pass used to render the degraded anchor condition."""
    if clip.sample_rate <= 7000:
        raise ValueError(
            f"sample_rate {clip.sample_rate} too low for a 3.5 kHz low-pass"
        )
    return apply_fir(clip, design_anchor_lowpass(clip.sample_rate))
