"""Figure rendering for the report paths.

Figures are written next to the delimited reports so a run directory is
self-contained. Everything uses the Agg backend; nothing opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import MetricReport
from .mushra import AVERAGE_ITEM, StatRow


def render_metric_figure(reports: list[MetricReport], path: str | Path) -> None:
    """Per-item SI-SDR/SI-SIR improvements with their means."""
    items = [r.item_id for r in reports]
    sdri = np.array([r.si_sdri for r in reports])
    siri = np.array([r.si_siri for r in reports])

    x = np.arange(len(items))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6.0, 0.8 * len(items) + 2.0), 4.0))
    ax.bar(x - width / 2, sdri, width, label="SI-SDRi", color="#4878d0")
    ax.bar(x + width / 2, siri, width, label="SI-SIRi", color="#ee854a")
    ax.axhline(sdri.mean(), color="#4878d0", linestyle="--", linewidth=1)
    ax.axhline(siri.mean(), color="#ee854a", linestyle="--", linewidth=1)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(x)
    ax.set_xticklabels(items, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("improvement [dB]")
    ax.legend(frameon=False)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_mushra_figure(rows: list[StatRow], path: str | Path) -> None:
    """Means with 95% CIs per item and condition; the across-items average
    sits on the right."""
    items = sorted({r.item for r in rows if r.item != AVERAGE_ITEM})
    if any(r.item == AVERAGE_ITEM for r in rows):
        items.append(AVERAGE_ITEM)
    conditions = sorted({r.condition for r in rows})
    by_cell = {(r.item, r.condition): r for r in rows}

    x = np.arange(len(items), dtype=float)
    n_cond = max(len(conditions), 1)
    offsets = (np.arange(n_cond) - (n_cond - 1) / 2) * (0.8 / n_cond)

    fig, ax = plt.subplots(figsize=(max(7.0, 1.1 * len(items) + 2.0), 4.5))
    cmap = plt.get_cmap("tab10")
    for ci, condition in enumerate(conditions):
        xs, means, errs = [], [], []
        for ii, item in enumerate(items):
            row = by_cell.get((item, condition))
            if row is None:
                continue
            xs.append(x[ii] + offsets[ci])
            means.append(row.mean)
            errs.append(row.mean - row.ci_low if row.ci_low is not None else 0.0)
        ax.errorbar(
            xs, means, yerr=errs, fmt="o", markersize=4, capsize=2,
            color=cmap(ci % 10), label=condition,
        )
    if AVERAGE_ITEM in items:
        ax.axvline(x[-1] - 0.5, color="gray", linewidth=0.8, linestyle=":")
    ax.set_xticks(x)
    ax.set_xticklabels(items, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("score")
    ax.set_ylim(-2, 102)
    ax.grid(axis="y", alpha=0.3)
    ax.legend(frameon=False, fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
