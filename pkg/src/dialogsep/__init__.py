"""Dialog-separation evaluation toolkit.

Stereo WAV I/O, sine-window STFT, oracle ratio-mask separation,
scale-invariant SDR/SIR metrics, BS.1770 loudness, loudness-matched
remixing for listening tests, MUSHRA session tooling, dataset chunking,
and a trainer-agnostic schedule controller.
"""

from .audio import AudioClip, Stems, apply_gain_db, db_to_linear, linear_to_db
from .dataset import (
    ChunkRef,
    DatasetSplit,
    EXCERPT_PRESETS,
    SamplerPlan,
    assign_splits,
    chunk,
    plan_epoch,
    split_chunks,
)
from .errors import (
    CannotNormalizeError,
    ConfigurationError,
    DegenerateReferenceError,
    NoInactivityError,
    WavFormatError,
)
from .filters import design_anchor_lowpass, lowpass_3k5
from .loudness import (
    ActivityMask,
    LoudnessConfig,
    dialog_activity_mask,
    integrated_loudness,
    loudness_during_inactivity,
    normalize_to_lufs,
)
from .metrics import (
    MetricReport,
    aggregate,
    decompose,
    evaluate_item,
    si_sdr,
    si_sir,
    write_report_csv,
    write_summary_json,
)
from .mushra import (
    MushraSession,
    RatingRecord,
    ScreeningResult,
    StatRow,
    build_session,
    load_ratings,
    load_session,
    post_screen,
    resolve_labels,
    stats,
    write_stats_csv,
)
from .oracle import IrmConfig, SeparationResult, irm_mask, separate_oracle
from .remix import (
    ConditionItem,
    RemixSpec,
    derive_background,
    make_anchor,
    make_hidden_reference,
    make_reference_condition,
    prepare_condition,
    remix,
)
from .resample import resample
from .schedule import Decision, ScheduleConfig, ScheduleController, run_schedule
from .stft import Spectrogram, StftConfig, istft, sine_window, stft
from .wavio import load_wav, save_wav

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "Stems",
    "apply_gain_db",
    "db_to_linear",
    "linear_to_db",
    "ChunkRef",
    "DatasetSplit",
    "EXCERPT_PRESETS",
    "SamplerPlan",
    "assign_splits",
    "chunk",
    "plan_epoch",
    "split_chunks",
    "CannotNormalizeError",
    "ConfigurationError",
    "DegenerateReferenceError",
    "NoInactivityError",
    "WavFormatError",
    "design_anchor_lowpass",
    "lowpass_3k5",
    "ActivityMask",
    "LoudnessConfig",
    "dialog_activity_mask",
    "integrated_loudness",
    "loudness_during_inactivity",
    "normalize_to_lufs",
    "MetricReport",
    "aggregate",
    "decompose",
    "evaluate_item",
    "si_sdr",
    "si_sir",
    "write_report_csv",
    "write_summary_json",
    "MushraSession",
    "RatingRecord",
    "ScreeningResult",
    "StatRow",
    "build_session",
    "load_ratings",
    "load_session",
    "post_screen",
    "resolve_labels",
    "stats",
    "write_stats_csv",
    "IrmConfig",
    "SeparationResult",
    "irm_mask",
    "separate_oracle",
    "ConditionItem",
    "RemixSpec",
    "derive_background",
    "make_anchor",
    "make_hidden_reference",
    "make_reference_condition",
    "prepare_condition",
    "remix",
    "resample",
    "Decision",
    "ScheduleConfig",
    "ScheduleController",
    "run_schedule",
    "Spectrogram",
    "StftConfig",
    "istft",
    "sine_window",
    "stft",
    "load_wav",
    "save_wav",
    "__version__",
]
