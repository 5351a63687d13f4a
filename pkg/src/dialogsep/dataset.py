"""Dataset chunking, split assignment and per-model excerpt sampling.

Items are cut into fixed-length chunks (default 15 s) with the trailing
remainder dropped; padding would inject artificial silence and skew loudness
statistics. Splits are assigned per source program so no program straddles
train/validation/test. The epoch sampler draws random excerpt offsets from a
seeded generator, repeating each chunk a model-specific number of times so
different excerpt lengths see a similar amount of audio per epoch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .audio import Stems

log = logging.getLogger(__name__)

DEFAULT_CHUNK_SECONDS = 15.0

# Hours per split used as proportional targets: train, validation, test.
DEFAULT_SPLIT_HOURS = (15.0, 1.45, 0.9)
SPLIT_NAMES = ("train", "validation", "test")

# Excerpt seconds and repeats-per-epoch that give each model a comparable
# amount of audio per epoch.
EXCERPT_PRESETS = {
    "umx": (6.0, 2),
    "convtasnet": (2.8, 4),
    "spleeter": (12.0, 1),
}


@dataclass(frozen=True)
class SamplerPlan:
    excerpt_seconds: float
    repeats_per_epoch: int = 1
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.excerpt_seconds <= 0.0:
            raise ValueError(f"excerpt_seconds must be positive, got {self.excerpt_seconds}")
        if self.repeats_per_epoch < 1:
            raise ValueError(f"repeats_per_epoch must be >= 1, got {self.repeats_per_epoch}")


@dataclass(frozen=True)
class ChunkRef:
    chunk_id: str
    source_item: str
    program: str
    start_sample: int
    num_samples: int
    sample_rate: int

    @property
    def duration_seconds(self) -> float:
        return self.num_samples / self.sample_rate


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[ChunkRef, ...]
    validation: tuple[ChunkRef, ...]
    test: tuple[ChunkRef, ...]

    def members(self, name: str) -> tuple[ChunkRef, ...]:
        return getattr(self, "validation" if name == "validation" else name)

    def duration_hours(self, name: str) -> float:
        return sum(c.duration_seconds for c in self.members(name)) / 3600.0


def chunk(stems: Stems, chunk_seconds: float = DEFAULT_CHUNK_SECONDS) -> list[Stems]:
    """Consecutive non-overlapping chunks; the sub-chunk remainder is dropped."""
    if chunk_seconds <= 0.0:
        raise ValueError(f"chunk_seconds must be positive, got {chunk_seconds}")
    samples_per_chunk = int(round(chunk_seconds * stems.sample_rate))
    n_chunks = stems.num_samples // samples_per_chunk
    if n_chunks == 0:
        log.warning(
            "item of %.2f s is shorter than one %.0f s chunk; nothing to emit",
            stems.num_samples / stems.sample_rate,
            chunk_seconds,
        )
        return []
    return [
        stems.slice(k * samples_per_chunk, (k + 1) * samples_per_chunk)
        for k in range(n_chunks)
    ]


def assign_splits(
    program_durations: dict[str, float],
    split_hours: tuple[float, float, float] = DEFAULT_SPLIT_HOURS,
) -> dict[str, str]:
    """Greedy per-program split assignment against proportional duration
    targets; returns program -> split name."""
    if not program_durations:
        return {}
    total = float(sum(program_durations.values()))
    fractions = np.asarray(split_hours, dtype=float)
    fractions = fractions / fractions.sum()
    targets = fractions * total

    assigned = {name: 0.0 for name in SPLIT_NAMES}
    result: dict[str, str] = {}
    # biggest programs first so small ones can fill the remaining deficits
    order = sorted(program_durations, key=lambda p: (-program_durations[p], p))
    for program in order:
        deficits = [targets[i] - assigned[name] for i, name in enumerate(SPLIT_NAMES)]
        name = SPLIT_NAMES[int(np.argmax(deficits))]
        result[program] = name
        assigned[name] += program_durations[program]
    return result


def split_chunks(
    chunks: list[ChunkRef],
    split_hours: tuple[float, float, float] = DEFAULT_SPLIT_HOURS,
) -> DatasetSplit:
    """Partition chunk references into train/validation/test by program."""
    durations: dict[str, float] = {}
    for ref in chunks:
        durations[ref.program] = durations.get(ref.program, 0.0) + ref.duration_seconds
    membership = assign_splits(durations, split_hours)
    buckets: dict[str, list[ChunkRef]] = {name: [] for name in SPLIT_NAMES}
    for ref in chunks:
        buckets[membership[ref.program]].append(ref)
    return DatasetSplit(
        train=tuple(buckets["train"]),
        validation=tuple(buckets["validation"]),
        test=tuple(buckets["test"]),
    )


def plan_epoch(
    chunk_lengths: dict[str, int],
    plan: SamplerPlan,
    sample_rate: int,
) -> list[tuple[str, int]]:
    """(chunk_id, offset_samples) entries for one epoch.

    Every chunk appears exactly repeats_per_epoch times; offsets are drawn
    uniformly over the valid range from the plan's seeded generator, so a
    fixed seed replays the identical plan.
    """
    excerpt = int(round(plan.excerpt_seconds * sample_rate))
    rng = np.random.default_rng(plan.rng_seed)
    entries: list[tuple[str, int]] = []
    for chunk_id in sorted(chunk_lengths):
        length = chunk_lengths[chunk_id]
        if excerpt > length:
            raise ValueError(
                f"excerpt of {excerpt} samples exceeds chunk {chunk_id!r} "
                f"length {length}"
            )
        for _ in range(plan.repeats_per_epoch):
            offset = int(rng.integers(0, length - excerpt + 1))
            entries.append((chunk_id, offset))
    return entries
