"""Oracle ratio-mask separation from true stems.

The mask per time-frequency bin is |X|^p / (|X|^p + |B|^p + eps) computed
from the reference dialog and background spectrograms; with p = 2 this is a
Wiener-like mask. The mask (and its complement) is applied to the mixture
spectrogram, so the dialog and background estimates sum back to the mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip, Stems
from .stft import Spectrogram, StftConfig, istft, stft


@dataclass(frozen=True)
class IrmConfig:
    stft: StftConfig = field(default_factory=StftConfig)
    exponent: float = 2.0
    floor: float = 1e-12

    def __post_init__(self) -> None:
        if self.exponent <= 0.0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")
        if self.floor <= 0.0:
            raise ValueError(f"floor must be positive, got {self.floor}")


@dataclass(frozen=True)
class SeparationResult:
    dialog_estimate: AudioClip
    background_estimate: AudioClip


def irm_mask(
    dialog_spec: Spectrogram,
    background_spec: Spectrogram,
    cfg: IrmConfig | None = None,
) -> np.ndarray:
    """Real-valued mask in [0, 1] per (channel, frame, bin)."""
    cfg = cfg or IrmConfig()
    if dialog_spec.bins.shape != background_spec.bins.shape:
        raise ValueError(
            f"spectrogram shapes differ: {dialog_spec.bins.shape} vs "
            f"{background_spec.bins.shape}"
        )
    x_pow = np.abs(dialog_spec.bins) ** cfg.exponent
    b_pow = np.abs(background_spec.bins) ** cfg.exponent
    return x_pow / (x_pow + b_pow + cfg.floor)


def separate_oracle(stems: Stems, cfg: IrmConfig | None = None) -> SeparationResult:
    """Mask the mixture spectrogram with the stem-derived ratio mask."""
    cfg = cfg or IrmConfig()
    dialog_spec = stft(stems.dialog, cfg.stft)
    background_spec = stft(stems.background, cfg.stft)
    mixture_spec = stft(stems.mixture, cfg.stft)

    mask = irm_mask(dialog_spec, background_spec, cfg)
    dialog_estimate = istft(mixture_spec.with_bins(mask * mixture_spec.bins))
    background_estimate = istft(mixture_spec.with_bins((1.0 - mask) * mixture_spec.bins))
    return SeparationResult(dialog_estimate, background_estimate)
