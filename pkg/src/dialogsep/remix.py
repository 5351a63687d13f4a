"""Dialog-enhancement remixing and listening-test condition preparation.

A condition for the listening test is rendered in five steps:

1. Reference condition: true dialog plus the true background attenuated by
   12 dB relative to the input mix.
2. Measure the integrated loudness of that attenuated reference background
   over dialog-inactive blocks only, gating off.
3. Derive each method's background as mixture minus estimated dialog.
4. Find the background attenuation that matches the reference background
   loudness during dialog inactivity (clamped to at most 120 dB; boosting a
   too-quiet background is allowed and flagged).
5. Remix dialog estimate + attenuated background and normalize the item to
   the target integrated loudness (default -23 LUFS, gating off).

Because ungated loudness is exactly gain-linear, step 4 is solved in closed
form as a loudness difference instead of an iterative search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip, Stems, apply_gain_db, db_to_linear, linear_to_db
from .filters import lowpass_3k5
from .loudness import (
    ActivityMask,
    LoudnessConfig,
    dialog_activity_mask,
    loudness_during_inactivity,
    normalize_to_lufs,
)

REFERENCE_ATTENUATION_DB = 12.0
MAX_ATTENUATION_DB = 120.0
DEFAULT_TARGET_LUFS = -23.0

FLAG_SILENT_BACKGROUND = "silent-background"
FLAG_AMPLIFIED_BACKGROUND = "amplified-background"

_UNGATED = LoudnessConfig(gating=False)


@dataclass(frozen=True)
class RemixSpec:
    """Background scale factor mu (linear, >= 0) and the loudness target."""

    mu: float = db_to_linear(-REFERENCE_ATTENUATION_DB)
    target_lufs: float = DEFAULT_TARGET_LUFS

    def __post_init__(self) -> None:
        if self.mu < 0.0:
            raise ValueError(f"background scale must be >= 0, got {self.mu}")

    @property
    def attenuation_db(self) -> float:
        return -linear_to_db(self.mu)

    @classmethod
    def from_attenuation_db(cls, attenuation_db: float, target_lufs: float = DEFAULT_TARGET_LUFS):
        return cls(db_to_linear(-attenuation_db), target_lufs)


@dataclass(frozen=True)
class ConditionItem:
    """One rendered listening-test condition, normalized to the target
    loudness."""

    signal: AudioClip
    condition_id: str
    item_id: str
    background_attenuation_db: float
    normalization_gain_db: float
    flags: tuple[str, ...] = ()


def remix(dialog: AudioClip, background: AudioClip, spec: RemixSpec) -> AudioClip:
    """Sample-wise dialog + mu * background."""
    if dialog.num_samples != background.num_samples:
        raise ValueError(
            f"length mismatch: dialog {dialog.num_samples}, background "
            f"{background.num_samples}"
        )
    return dialog.with_samples(dialog.samples + spec.mu * background.samples)


def make_reference_condition(stems: Stems, spec: RemixSpec | None = None) -> AudioClip:
    """True dialog plus the true background attenuated by the configured factor."""
    return remix(stems.dialog, stems.background, spec or RemixSpec())


def derive_background(mixture: AudioClip, dialog_estimate: AudioClip) -> AudioClip:
    """Background estimate as mixture minus estimated dialog."""
    if mixture.num_samples != dialog_estimate.num_samples:
        raise ValueError(
            f"length mismatch: mixture {mixture.num_samples}, estimate "
            f"{dialog_estimate.num_samples}"
        )
    return mixture.with_samples(mixture.samples - dialog_estimate.samples)


def condition_attenuation(
    background_estimate: AudioClip,
    reference_background: AudioClip,
    mask: ActivityMask,
) -> tuple[float, tuple[str, ...]]:
    """Attenuation (dB) that matches the reference background loudness during
    dialog inactivity; (value, flags)."""
    reference_level = loudness_during_inactivity(reference_background, mask, _UNGATED)
    estimate_level = loudness_during_inactivity(background_estimate, mask, _UNGATED)
    if not np.isfinite(estimate_level):
        return MAX_ATTENUATION_DB, (FLAG_SILENT_BACKGROUND,)

    attenuation = estimate_level - reference_level
    flags: tuple[str, ...] = ()
    if attenuation > MAX_ATTENUATION_DB:
        attenuation = MAX_ATTENUATION_DB
    if attenuation < 0.0:
        flags = (FLAG_AMPLIFIED_BACKGROUND,)
    return attenuation, flags


def prepare_condition(
    stems: Stems,
    dialog_estimate: AudioClip,
    spec: RemixSpec | None = None,
    *,
    item_id: str = "",
    condition_id: str = "",
    activity_threshold_dbfs: float = -60.0,
) -> ConditionItem:
    """Run steps 2-5 for one method's dialog estimate."""
    spec = spec or RemixSpec()
    mask = dialog_activity_mask(stems.dialog, activity_threshold_dbfs)
    reference_background = stems.background.with_samples(spec.mu * stems.background.samples)

    background_estimate = derive_background(stems.mixture, dialog_estimate)
    attenuation, flags = condition_attenuation(background_estimate, reference_background, mask)

    mixed = dialog_estimate.with_samples(
        dialog_estimate.samples + db_to_linear(-attenuation) * background_estimate.samples
    )
    normalized, gain_db = normalize_to_lufs(mixed, spec.target_lufs, _UNGATED)
    return ConditionItem(
        signal=normalized,
        condition_id=condition_id,
        item_id=item_id,
        background_attenuation_db=attenuation,
        normalization_gain_db=gain_db,
        flags=flags,
    )


def make_hidden_reference(
    stems: Stems,
    spec: RemixSpec | None = None,
    *,
    item_id: str = "",
) -> ConditionItem:
    """Loudness-normalized reference condition (the hidden reference)."""
    spec = spec or RemixSpec()
    reference = make_reference_condition(stems, spec)
    normalized, gain_db = normalize_to_lufs(reference, spec.target_lufs, _UNGATED)
    return ConditionItem(
        signal=normalized,
        condition_id="hidden_reference",
        item_id=item_id,
        background_attenuation_db=spec.attenuation_db,
        normalization_gain_db=gain_db,
    )


def make_anchor(
    reference_condition: AudioClip,
    target_lufs: float = DEFAULT_TARGET_LUFS,
    *,
    item_id: str = "",
    background_attenuation_db: float = REFERENCE_ATTENUATION_DB,
) -> ConditionItem:
    """3.5 kHz low-passed reference, loudness-normalized."""
    filtered = lowpass_3k5(reference_condition)
    normalized, gain_db = normalize_to_lufs(filtered, target_lufs, _UNGATED)
    return ConditionItem(
        signal=normalized,
        condition_id="anchor_lp3500",
        item_id=item_id,
        background_attenuation_db=background_attenuation_db,
        normalization_gain_db=gain_db,
    )
