"""Polyphase windowed-sinc sample rate conversion.

Broadcast-quality settings: Kaiser-windowed sinc prototype with >= 80 dB
stopband, run through scipy's polyphase engine. Output length is pinned to
round(n * target / source) so chunk bookkeeping stays exact.
"""

from __future__ import annotations

from math import gcd

from scipy import signal

from .audio import AudioClip

STOPBAND_DB = 80.0


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Convert a clip to target_rate; identity when the rate already matches."""
    target_rate = int(target_rate)
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    source_rate = clip.sample_rate
    if target_rate == source_rate:
        return clip

    g = gcd(source_rate, target_rate)
    up, down = target_rate // g, source_rate // g
    beta = signal.kaiser_beta(STOPBAND_DB)
    out = signal.resample_poly(clip.samples, up, down, axis=0, window=("kaiser", beta))

    # resample_poly yields ceil(n*up/down) samples; trim to round(n*up/down)
    n_target = (clip.num_samples * up + down // 2) // down
    return AudioClip(out[:n_target], target_rate)
