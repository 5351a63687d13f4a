"""MUSHRA session construction, rating ingestion, post-screening, statistics.

Sessions hide condition identity behind per-item random label permutations;
the label -> condition key is written to a separate file so the public
session file (the one a listener's browser loads) never names a method.
Listeners who rated any condition strictly above the hidden reference on any
item are excluded in post-screening; ties are permitted since a transparent
condition legitimately earns the top score alongside the reference.

Per-cell statistics are the mean and the 95% confidence interval from
Student's t-distribution; quantiles come from the numerical inverse CDF, not
a hard-coded table.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import t as student_t

from .errors import ConfigurationError

HIDDEN_REFERENCE = "hidden_reference"
ANCHOR = "anchor_lp3500"
AVERAGE_ITEM = "average"

SCALE_MIN = 0
SCALE_MAX = 100

REASON_INCOMPLETE = "incomplete"

STATS_COLUMNS = ("item", "condition", "mean", "ci_low", "ci_high", "n")


@dataclass(frozen=True)
class RatingRecord:
    listener_id: str
    item_id: str
    condition_id: str
    score: int
    timestamp: str = ""

    def __post_init__(self) -> None:
        if not SCALE_MIN <= self.score <= SCALE_MAX:
            raise ValueError(
                f"score {self.score} outside [{SCALE_MIN}, {SCALE_MAX}] "
                f"({self.listener_id}/{self.item_id}/{self.condition_id})"
            )


@dataclass(frozen=True)
class MushraSession:
    items: tuple[str, ...]
    conditions: tuple[str, ...]
    stimuli: dict  # item -> opaque label -> stimulus path
    key: dict  # item -> opaque label -> condition id
    listener_orders: dict  # listener slot -> {"items": [...], "conditions": {item: [...]}}
    seed: int
    scale: tuple[int, int] = (SCALE_MIN, SCALE_MAX)

    def public_payload(self) -> dict:
        """Everything a test runner may see; no condition identities."""
        return {
            "scale": {"min": self.scale[0], "max": self.scale[1]},
            "seed": self.seed,
            "items": [
                {
                    "item_id": item,
                    "stimuli": [
                        {"label": label, "path": self.stimuli[item][label]}
                        for label in sorted(self.stimuli[item])
                    ],
                }
                for item in self.items
            ],
            "listener_orders": self.listener_orders,
        }

    def key_payload(self) -> dict:
        return {"conditions": list(self.conditions), "key": self.key}

    def save(self, out_dir: str | Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        session_path = out_dir / "session.json"
        key_path = out_dir / "session_key.json"
        session_path.write_text(json.dumps(self.public_payload(), indent=2, sort_keys=True) + "\n")
        key_path.write_text(json.dumps(self.key_payload(), indent=2, sort_keys=True) + "\n")
        return session_path, key_path


def build_session(
    stimuli: dict,
    seed: int = 0,
    num_listeners: int = 1,
) -> MushraSession:
    """Lay out a session from {item -> {condition_id -> stimulus path}}.

    Every item must carry the identical condition set including the hidden
    reference and the low-pass anchor. Labels and presentation orders are
    drawn from one generator seeded with ``seed``, so the layout replays
    exactly.
    """
    if not stimuli:
        raise ConfigurationError("no items supplied")
    items = tuple(sorted(stimuli))
    conditions = tuple(sorted(stimuli[items[0]]))
    for item in items:
        item_conditions = tuple(sorted(stimuli[item]))
        if item_conditions != conditions:
            raise ConfigurationError(
                f"item {item!r} conditions {item_conditions} differ from {conditions}"
            )
    for required in (HIDDEN_REFERENCE, ANCHOR):
        if required not in conditions:
            missing = [item for item in items if required not in stimuli[item]]
            raise ConfigurationError(
                f"condition {required!r} missing (items: {missing or list(items)})"
            )

    rng = np.random.default_rng(seed)
    labels = [f"c{i + 1:02d}" for i in range(len(conditions))]

    label_map: dict = {}
    key: dict = {}
    for item in items:
        shuffled = list(labels)
        rng.shuffle(shuffled)
        label_map[item] = {
            condition: label for condition, label in zip(conditions, shuffled)
        }
        key[item] = {label: condition for condition, label in label_map[item].items()}

    stimuli_by_label = {
        item: {label_map[item][condition]: stimuli[item][condition] for condition in conditions}
        for item in items
    }

    listener_orders: dict = {}
    for slot in range(num_listeners):
        item_order = list(items)
        rng.shuffle(item_order)
        condition_orders = {}
        for item in items:
            order = sorted(key[item])
            rng.shuffle(order)
            condition_orders[item] = order
        listener_orders[f"L{slot + 1:02d}"] = {
            "items": item_order,
            "conditions": condition_orders,
        }

    return MushraSession(
        items=items,
        conditions=conditions,
        stimuli=stimuli_by_label,
        key=key,
        listener_orders=listener_orders,
        seed=seed,
    )


def load_session(session_dir: str | Path) -> MushraSession:
    """Rebuild a session from session.json + session_key.json in a directory."""
    session_dir = Path(session_dir)
    public = json.loads((session_dir / "session.json").read_text())
    key_payload = json.loads((session_dir / "session_key.json").read_text())
    return MushraSession(
        items=tuple(entry["item_id"] for entry in public["items"]),
        conditions=tuple(key_payload["conditions"]),
        stimuli={
            entry["item_id"]: {s["label"]: s["path"] for s in entry["stimuli"]}
            for entry in public["items"]
        },
        key=key_payload["key"],
        listener_orders=public["listener_orders"],
        seed=public["seed"],
        scale=(public["scale"]["min"], public["scale"]["max"]),
    )


def resolve_labels(records: list[RatingRecord], key: dict) -> list[RatingRecord]:
    """Map opaque condition labels back to condition ids via a session key."""
    resolved = []
    for record in records:
        item_key = key.get(record.item_id)
        if item_key is None:
            raise ValueError(f"unknown item {record.item_id!r} in ratings")
        condition = item_key.get(record.condition_id)
        if condition is None:
            raise ValueError(
                f"unknown condition label {record.condition_id!r} for item "
                f"{record.item_id!r}"
            )
        resolved.append(
            RatingRecord(
                record.listener_id, record.item_id, condition, record.score, record.timestamp
            )
        )
    return resolved


def dedupe_ratings(records: list[RatingRecord]) -> list[RatingRecord]:
    """Last-write-wins on (listener, item, condition), preserving first-seen
    order."""
    latest: dict = {}
    for record in records:
        latest[(record.listener_id, record.item_id, record.condition_id)] = record
    return list(latest.values())


def load_ratings(path: str | Path) -> list[RatingRecord]:
    """Read ratings from CSV or JSON lines, deduplicated last-write-wins."""
    text = Path(path).read_text()
    records: list[RatingRecord] = []
    stripped = text.lstrip()
    if stripped.startswith("{"):
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON line: {exc}") from exc
            records.append(_record_from_mapping(obj, f"{path}:{line_no}"))
    else:
        reader = csv.DictReader(text.splitlines())
        for line_no, row in enumerate(reader, start=2):
            records.append(_record_from_mapping(row, f"{path}:{line_no}"))
    return dedupe_ratings(records)


def _record_from_mapping(obj: dict, where: str) -> RatingRecord:
    try:
        return RatingRecord(
            listener_id=str(obj["listener_id"]),
            item_id=str(obj["item_id"]),
            condition_id=str(obj["condition_id"]),
            score=int(obj["score"]),
            timestamp=str(obj.get("timestamp", "") or ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{where}: bad rating record: {exc}") from exc


@dataclass(frozen=True)
class ScreeningResult:
    kept: tuple[str, ...]
    excluded: dict  # listener -> reason


def post_screen(records: list[RatingRecord], session: MushraSession | None = None) -> ScreeningResult:
    """Exclude listeners who are incomplete or who rated any condition
    strictly above the hidden reference on any item."""
    by_listener: dict = {}
    for record in records:
        by_listener.setdefault(record.listener_id, {})[
            (record.item_id, record.condition_id)
        ] = record.score

    if session is not None:
        expected = {(item, cond) for item in session.items for cond in session.conditions}
    else:
        expected = set()
        for scores in by_listener.values():
            expected |= set(scores)

    kept: list[str] = []
    excluded: dict = {}
    for listener in sorted(by_listener):
        scores = by_listener[listener]
        if set(scores) != expected:
            excluded[listener] = REASON_INCOMPLETE
            continue
        violation = None
        for (item, condition), score in sorted(scores.items()):
            if condition == HIDDEN_REFERENCE:
                continue
            reference_score = scores.get((item, HIDDEN_REFERENCE))
            if reference_score is None:
                raise ConfigurationError(
                    f"no hidden reference rating for item {item!r} "
                    f"(listener {listener!r})"
                )
            if score > reference_score:
                violation = (item, condition)
                break
        if violation is not None:
            excluded[listener] = (
                f"rated {violation[1]} above the hidden reference on item {violation[0]}"
            )
        else:
            kept.append(listener)
    return ScreeningResult(tuple(kept), excluded)


@dataclass(frozen=True)
class StatRow:
    item: str
    condition: str
    mean: float
    ci_low: float | None
    ci_high: float | None
    n: int


def t_interval_half_width(std: float, n: int, confidence: float = 0.95) -> float:
    quantile = float(student_t.ppf(0.5 + confidence / 2.0, n - 1))
    return quantile * std / np.sqrt(n)


def stats(records: list[RatingRecord], confidence: float = 0.95) -> list[StatRow]:
    """Per (item, condition) mean and t-distribution CI over listeners, plus
    per-condition rows averaging each listener across items."""
    by_cell: dict = {}
    by_listener_condition: dict = {}
    for record in records:
        by_cell.setdefault((record.item_id, record.condition_id), []).append(record.score)
        by_listener_condition.setdefault(record.condition_id, {}).setdefault(
            record.listener_id, []
        ).append(record.score)

    rows = [
        _stat_row(item, condition, np.asarray(scores, dtype=float), confidence)
        for (item, condition), scores in sorted(by_cell.items())
    ]
    # across-items average: one value per listener, then the same t-interval
    for condition in sorted(by_listener_condition):
        per_listener = [
            float(np.mean(scores))
            for _, scores in sorted(by_listener_condition[condition].items())
        ]
        rows.append(_stat_row(AVERAGE_ITEM, condition, np.asarray(per_listener), confidence))
    return rows


def _stat_row(item: str, condition: str, values: np.ndarray, confidence: float) -> StatRow:
    n = len(values)
    mean = float(np.mean(values))
    if n < 2:
        return StatRow(item, condition, mean, None, None, n)
    half = t_interval_half_width(float(np.std(values, ddof=1)), n, confidence)
    return StatRow(item, condition, mean, mean - half, mean + half, n)


def write_stats_csv(rows: list[StatRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(STATS_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.item,
                    row.condition,
                    f"{row.mean:.6g}",
                    "" if row.ci_low is None else f"{row.ci_low:.6g}",
                    "" if row.ci_high is None else f"{row.ci_high:.6g}",
                    row.n,
                ]
            )
