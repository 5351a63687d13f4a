"""Core audio containers and gain utilities.

All signals in this toolkit are stereo, held as float64 arrays of shape
(n_samples, 2) with nominal full scale [-1, 1]. Instances are treated as
immutable after construction; every operation returns a new clip.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_MIX_TOLERANCE = 1e-4


def db_to_linear(gain_db: float) -> float:
    """Amplitude factor for a gain in dB."""
    return float(10.0 ** (gain_db / 20.0))


def linear_to_db(factor: float) -> float:
    """Gain in dB for a positive amplitude factor."""
    if factor <= 0.0:
        return float("-inf")
    return float(20.0 * np.log10(factor))


@dataclass(frozen=True)
class AudioClip:
    """A stereo audio signal with its sample rate.

    samples has shape (n_samples, 2). Both channels always have the same
    length by construction.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise ValueError(f"expected samples of shape (n, 2), got {samples.shape}")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def num_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_seconds(self) -> float:
        return self.num_samples / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> "AudioClip":
        return AudioClip(samples, self.sample_rate)

    def slice(self, start: int, stop: int) -> "AudioClip":
        return AudioClip(self.samples[start:stop], self.sample_rate)


def apply_gain_db(clip: AudioClip, gain_db: float) -> AudioClip:
    """Scale every sample by 10^(gain_db/20)."""
    if not np.isfinite(gain_db):
        raise ValueError(f"gain_db must be finite, got {gain_db}")
    return clip.with_samples(clip.samples * db_to_linear(gain_db))


@dataclass(frozen=True)
class Stems:
    """Temporally aligned mixture, dialog and background tracks.

    The mixture must equal dialog + background within mix_tolerance at every
    sample; the three clips share sample rate and length.
    """

    mixture: AudioClip
    dialog: AudioClip
    background: AudioClip
    mix_tolerance: float = field(default=DEFAULT_MIX_TOLERANCE)

    def __post_init__(self) -> None:
        rates = {self.mixture.sample_rate, self.dialog.sample_rate, self.background.sample_rate}
        if len(rates) != 1:
            raise ValueError(f"stems disagree on sample rate: {sorted(rates)}")
        lengths = {self.mixture.num_samples, self.dialog.num_samples, self.background.num_samples}
        if len(lengths) != 1:
            raise ValueError(f"stems disagree on length: {sorted(lengths)}")
        residual = self.mixture.samples - (self.dialog.samples + self.background.samples)
        peak = float(np.max(np.abs(residual))) if residual.size else 0.0
        if peak > self.mix_tolerance:
            raise ValueError(
                f"mixture differs from dialog + background by {peak:.3g} "
                f"(tolerance {self.mix_tolerance:.3g})"
            )

    @property
    def sample_rate(self) -> int:
        return self.mixture.sample_rate

    @property
    def num_samples(self) -> int:
        return self.mixture.num_samples

    def slice(self, start: int, stop: int) -> "Stems":
        return Stems(
            self.mixture.slice(start, stop),
            self.dialog.slice(start, stop),
            self.background.slice(start, stop),
            self.mix_tolerance,
        )
