"""Scale-invariant separation metrics built on orthogonal projections.

An estimate is decomposed against the reference dialog s and background b:
the target part is the scaled projection onto s, the interference part is
whatever else the span of {s, b} captures, and the artifact part is the
remainder. SI-SDR and SI-SIR are energy ratios of those parts, clamped to
[-100, +100] dB so exact zeros stay reportable.

Stereo items are concatenated into one vector before projection, keeping the
inter-channel level relation under a single scaling coefficient; a
per-channel-mean alternative is available via ``stereo_mode``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .audio import AudioClip, Stems
from .errors import DegenerateReferenceError

CLAMP_DB = 100.0

REPORT_COLUMNS = (
    "item_id",
    "si_sdr_in",
    "si_sdr_out",
    "si_sdri",
    "si_sir_in",
    "si_sir_out",
    "si_siri",
)


@dataclass(frozen=True)
class ProjectionDecomposition:
    """estimate = s_target + e_interf + e_artif, pairwise orthogonal."""

    s_target: np.ndarray
    e_interf: np.ndarray
    e_artif: np.ndarray
    alpha: float


@dataclass(frozen=True)
class MetricReport:
    item_id: str
    si_sdr_in: float
    si_sdr_out: float
    si_sdri: float
    si_sir_in: float
    si_sir_out: float
    si_siri: float


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError("empty signal vector")
    return v


def decompose(estimate, reference_target, reference_interference) -> ProjectionDecomposition:
    """Project the estimate onto the reference dialog and the {dialog,
    background} span."""
    est = _as_vector(estimate)
    s = _as_vector(reference_target)
    b = _as_vector(reference_interference)
    if not est.size == s.size == b.size:
        raise ValueError(
            f"length mismatch: estimate {est.size}, target {s.size}, interference {b.size}"
        )
    s_energy = float(np.dot(s, s))
    if s_energy == 0.0:
        raise DegenerateReferenceError("reference target has zero energy")

    alpha = float(np.dot(est, s)) / s_energy
    s_target = alpha * s

    basis = np.stack([s, b], axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, est, rcond=None)
    projected = basis @ coeffs
    e_interf = projected - s_target
    e_artif = est - projected
    return ProjectionDecomposition(s_target, e_interf, e_artif, alpha)


def _ratio_db(num_energy: float, den_energy: float) -> float:
    if den_energy == 0.0:
        return CLAMP_DB
    if num_energy == 0.0:
        return -CLAMP_DB
    return float(np.clip(10.0 * np.log10(num_energy / den_energy), -CLAMP_DB, CLAMP_DB))


def si_sdr(estimate, reference_target) -> float:
    """Scale-invariant signal-to-distortion ratio in dB."""
    est = _as_vector(estimate)
    s = _as_vector(reference_target)
    if est.size != s.size:
        raise ValueError(f"length mismatch: estimate {est.size}, target {s.size}")
    if not np.any(est):
        raise DegenerateReferenceError("estimate has zero energy")
    s_energy = float(np.dot(s, s))
    if s_energy == 0.0:
        raise DegenerateReferenceError("reference target has zero energy")
    alpha = float(np.dot(est, s)) / s_energy
    target = alpha * s
    error = est - target
    return _ratio_db(float(np.dot(target, target)), float(np.dot(error, error)))


def si_sir(estimate, reference_target, reference_interference) -> float:
    """Scale-invariant signal-to-interference ratio in dB."""
    parts = decompose(estimate, reference_target, reference_interference)
    return _ratio_db(
        float(np.dot(parts.s_target, parts.s_target)),
        float(np.dot(parts.e_interf, parts.e_interf)),
    )


def _flatten(clip: AudioClip, stereo_mode: str) -> np.ndarray:
    if stereo_mode != "concat":
        raise ValueError(f"unknown stereo_mode {stereo_mode!r}")
    return clip.samples.reshape(-1, order="F")  # channel blocks back to back


def _item_metrics(estimate: AudioClip, stems: Stems, stereo_mode: str) -> tuple[float, float]:
    if stereo_mode == "per_channel_mean":
        sdrs, sirs = [], []
        for c in range(2):
            est = estimate.samples[:, c]
            s = stems.dialog.samples[:, c]
            b = stems.background.samples[:, c]
            sdrs.append(si_sdr(est, s))
            sirs.append(si_sir(est, s, b))
        return float(np.mean(sdrs)), float(np.mean(sirs))
    est = _flatten(estimate, stereo_mode)
    s = _flatten(stems.dialog, stereo_mode)
    b = _flatten(stems.background, stereo_mode)
    return si_sdr(est, s), si_sir(est, s, b)


def evaluate_item(
    stems: Stems,
    dialog_estimate: AudioClip,
    item_id: str = "",
    stereo_mode: str = "concat",
) -> MetricReport:
    """Input metrics treat the mixture as the dialog estimate; output metrics
    use the separated dialog. Improvements are output minus input."""
    if dialog_estimate.num_samples != stems.num_samples:
        raise ValueError(
            f"estimate length {dialog_estimate.num_samples} does not match "
            f"stems length {stems.num_samples}"
        )
    sdr_in, sir_in = _item_metrics(stems.mixture, stems, stereo_mode)
    sdr_out, sir_out = _item_metrics(dialog_estimate, stems, stereo_mode)
    return MetricReport(
        item_id=item_id,
        si_sdr_in=sdr_in,
        si_sdr_out=sdr_out,
        si_sdri=sdr_out - sdr_in,
        si_sir_in=sir_in,
        si_sir_out=sir_out,
        si_siri=sir_out - sir_in,
    )


def format_mean_std(mean: float, std: float) -> str:
    return f"{mean:.1f} ± {std:.1f}"


def aggregate(reports: list[MetricReport]) -> dict:
    """Mean and unbiased standard deviation per metric, plus the 'M ± S'
    one-decimal presentation."""
    if not reports:
        raise ValueError("cannot aggregate an empty report list")
    summary: dict = {"n": len(reports)}
    for column in REPORT_COLUMNS[1:]:
        values = np.array([getattr(r, column) for r in reports], dtype=np.float64)
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        summary[column] = {
            "mean": mean,
            "std": std,
            "formatted": format_mean_std(mean, std),
        }
    return summary


def write_report_csv(reports: list[MetricReport], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for report in reports:
            writer.writerow(asdict(report))


def write_summary_json(summary: dict, path: str | Path) -> None:
    with open(path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
