"""Command-line entry point wiring the library into batch workflows.

Commands: prep, oracle, eval, remix, mushra-gen, mushra-report.

Configuration comes from a JSON file (--config) whose keys match the flag
names; an explicit flag overrides the config value. Every command is
deterministic given its inputs and --seed: manifests are written with sorted
keys and relative paths and contain no timestamps, so reruns are
byte-identical.

Exit codes: 0 success, 1 some items failed, 2 configuration or input error
(including every item failing).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import re
import shutil
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

from . import dataset
from .audio import Stems, db_to_linear
from .errors import ConfigurationError
from .metrics import aggregate, evaluate_item, write_report_csv, write_summary_json
from .mushra import (
    build_session,
    load_ratings,
    load_session,
    post_screen,
    resolve_labels,
    stats,
    write_stats_csv,
)
from .oracle import IrmConfig, separate_oracle
from .plotting import render_metric_figure, render_mushra_figure
from .remix import (
    RemixSpec,
    make_anchor,
    make_hidden_reference,
    make_reference_condition,
    prepare_condition,
)
from .resample import resample
from .stft import StftConfig
from .wavio import load_wav, save_wav

log = logging.getLogger(__name__)

DEFAULT_SAMPLE_RATE = 44100

# Item ids become file and directory names.
_ITEM_ID_RE = re.compile(r"^[A-Za-z0-9._-]+$")


# ---------------------------------------------------------------------------
# config plumbing


def _load_config_file(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    return payload


def _merged_config(args: argparse.Namespace) -> dict:
    """Config file first, explicit flags override; keys match flag names."""
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("config", "command", "func") or value is None:
            continue
        merged[key] = value
    return merged


def _require(cfg: dict, key: str) -> str:
    value = cfg.get(key)
    if value in (None, ""):
        raise ConfigurationError(f"missing required option {key!r} (flag --{key.replace('_', '-')})")
    return value


def _out_dir(cfg: dict) -> Path:
    out = Path(_require(cfg, "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve(base: Path, rel: str) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else base / p


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# item manifests


def _load_items_manifest(path: str) -> tuple[list[dict], Path]:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON: {exc}") from exc
    items = payload.get("items") if isinstance(payload, dict) else None
    if not isinstance(items, list) or not items:
        raise ConfigurationError(f"{path}: manifest lists no items")
    seen: set[str] = set()
    for entry in items:
        if not isinstance(entry, dict) or not entry.get("item_id"):
            raise ConfigurationError(f"{path}: every item needs an item_id")
        item_id = str(entry["item_id"])
        if not _ITEM_ID_RE.match(item_id):
            raise ConfigurationError(f"{path}: item_id {item_id!r} has characters unsafe for filenames")
        if item_id in seen:
            raise ConfigurationError(f"{path}: duplicate item_id {item_id!r}")
        seen.add(item_id)
    return items, Path(path).parent


def _load_stems(entry: dict, base: Path) -> Stems:
    clips = {}
    for stem in ("mixture", "dialog", "background"):
        rel = entry.get(stem)
        if not rel:
            raise ConfigurationError(f"item {entry['item_id']}: missing {stem} path")
        clips[stem] = load_wav(_resolve(base, str(rel)))
    return Stems(**clips)


def _map_items(entries: list[dict], worker, max_workers: int) -> tuple[dict, dict]:
    """Run worker(entry) per item, isolating failures. Returns
    (item_id -> result, item_id -> error message)."""
    results: dict = {}
    errors: dict = {}
    if max_workers <= 1:
        for entry in entries:
            item_id = str(entry["item_id"])
            try:
                results[item_id] = worker(entry)
            except Exception as exc:
                errors[item_id] = str(exc)
                log.error("item %s failed: %s", item_id, exc)
        return results, errors
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {pool.submit(worker, entry): str(entry["item_id"]) for entry in entries}
        for future in as_completed(futures):
            item_id = futures[future]
            try:
                results[item_id] = future.result()
            except Exception as exc:
                errors[item_id] = str(exc)
                log.error("item %s failed: %s", item_id, exc)
    return results, errors


def _exit_code(total: int, errors: dict) -> int:
    if not errors:
        return 0
    if len(errors) == total:
        raise ConfigurationError(f"all {total} items failed; first error: {next(iter(errors.values()))}")
    return 1


# ---------------------------------------------------------------------------
# prep


def cmd_prep(cfg: dict) -> int:
    entries, base = _load_items_manifest(_require(cfg, "manifest"))
    out = _out_dir(cfg)
    chunk_seconds = float(cfg.get("chunk_seconds", dataset.DEFAULT_CHUNK_SECONDS))
    sample_rate = int(cfg.get("sample_rate", DEFAULT_SAMPLE_RATE))
    seed = int(cfg.get("seed", 0))
    split_hours = tuple(float(h) for h in cfg.get("split_hours", dataset.DEFAULT_SPLIT_HOURS))
    if len(split_hours) != 3:
        raise ConfigurationError("split_hours needs exactly three values (train, validation, test)")
    samples_per_chunk = int(round(chunk_seconds * sample_rate))

    def worker(entry: dict):
        stems = _load_stems(entry, base)
        resampled = {
            name: resample(getattr(stems, name), sample_rate)
            for name in ("mixture", "dialog", "background")
        }
        # Identical linear resampling keeps y = x + b; trim the odd sample a
        # rate conversion of mismatched inputs can leave.
        n = min(clip.num_samples for clip in resampled.values())
        stems = Stems(**{name: clip.slice(0, n) for name, clip in resampled.items()})
        written = []
        for idx, chunk_stems in enumerate(dataset.chunk(stems, chunk_seconds)):
            chunk_id = f"{entry['item_id']}_c{idx:03d}"
            chunk_dir = out / "chunks" / chunk_id
            chunk_dir.mkdir(parents=True, exist_ok=True)
            for name in ("mixture", "dialog", "background"):
                save_wav(getattr(chunk_stems, name), chunk_dir / f"{name}.wav")
            written.append((chunk_id, idx))
        return str(entry.get("program", entry["item_id"])), written

    results, errors = _map_items(entries, worker, int(cfg.get("workers", 1)))

    refs = []
    for item_id in sorted(results):
        program, written = results[item_id]
        for chunk_id, idx in written:
            refs.append(
                dataset.ChunkRef(
                    chunk_id=chunk_id,
                    source_item=item_id,
                    program=program,
                    start_sample=idx * samples_per_chunk,
                    num_samples=samples_per_chunk,
                    sample_rate=sample_rate,
                )
            )
    split = dataset.split_chunks(refs, split_hours)
    membership = {
        ref.chunk_id: name
        for name in ("train", "validation", "test")
        for ref in split.members(name)
    }

    manifest = {
        "chunk_seconds": chunk_seconds,
        "sample_rate": sample_rate,
        "seed": seed,
        "split_hours": {name: split.duration_hours(name) for name in ("train", "validation", "test")},
        "items": [
            {
                "item_id": ref.chunk_id,
                "program": ref.program,
                "source_item": ref.source_item,
                "split": membership[ref.chunk_id],
                "start_sample": ref.start_sample,
                "num_samples": ref.num_samples,
                "mixture": f"chunks/{ref.chunk_id}/mixture.wav",
                "dialog": f"chunks/{ref.chunk_id}/dialog.wav",
                "background": f"chunks/{ref.chunk_id}/background.wav",
            }
            for ref in sorted(refs, key=lambda r: r.chunk_id)
        ],
    }
    _write_json(manifest, out / "dataset_manifest.json")
    log.info("wrote %d chunks from %d items", len(refs), len(results))

    if cfg.get("excerpt_seconds") is not None:
        plan = dataset.SamplerPlan(
            excerpt_seconds=float(cfg["excerpt_seconds"]),
            repeats_per_epoch=int(cfg.get("repeats", 1)),
            rng_seed=seed,
        )
        train_lengths = {ref.chunk_id: ref.num_samples for ref in split.train}
        entries_out = [
            {"chunk_id": chunk_id, "offset_samples": offset}
            for chunk_id, offset in dataset.plan_epoch(train_lengths, plan, sample_rate)
        ]
        _write_json(
            {
                "excerpt_seconds": plan.excerpt_seconds,
                "repeats_per_epoch": plan.repeats_per_epoch,
                "seed": seed,
                "entries": entries_out,
            },
            out / "epoch_plan.json",
        )
        log.info("planned %d excerpts over %d train chunks", len(entries_out), len(train_lengths))

    return _exit_code(len(entries), errors)


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle(cfg: dict) -> int:
    entries, base = _load_items_manifest(_require(cfg, "manifest"))
    out = _out_dir(cfg)
    (out / "dialog").mkdir(exist_ok=True)
    (out / "background").mkdir(exist_ok=True)
    irm = IrmConfig(
        stft=StftConfig(window_length=int(cfg.get("window_length", 2048))),
        exponent=float(cfg.get("irm_exponent", 2.0)),
    )

    def worker(entry: dict):
        stems = _load_stems(entry, base)
        result = separate_oracle(stems, irm)
        item_id = str(entry["item_id"])
        save_wav(result.dialog_estimate, out / "dialog" / f"{item_id}.wav")
        save_wav(result.background_estimate, out / "background" / f"{item_id}.wav")
        return {
            "dialog": f"dialog/{item_id}.wav",
            "background": f"background/{item_id}.wav",
        }

    results, errors = _map_items(entries, worker, int(cfg.get("workers", 1)))
    _write_json(
        {"window_length": irm.stft.window_length, "exponent": irm.exponent,
         "items": {item_id: results[item_id] for item_id in sorted(results)}},
        out / "oracle_manifest.json",
    )
    log.info("separated %d/%d items", len(results), len(entries))
    return _exit_code(len(entries), errors)


# ---------------------------------------------------------------------------
# eval


def cmd_eval(cfg: dict) -> int:
    entries, base = _load_items_manifest(_require(cfg, "manifest"))
    out = _out_dir(cfg)
    estimates = Path(_require(cfg, "estimates"))
    stereo_mode = str(cfg.get("stereo_mode", "concat"))

    missing = sorted(
        str(e["item_id"]) for e in entries if not (estimates / f"{e['item_id']}.wav").exists()
    )
    if missing:
        raise ConfigurationError(f"missing estimates for items: {', '.join(missing)}")

    def worker(entry: dict):
        stems = _load_stems(entry, base)
        estimate = load_wav(estimates / f"{entry['item_id']}.wav")
        return evaluate_item(stems, estimate, item_id=str(entry["item_id"]), stereo_mode=stereo_mode)

    results, errors = _map_items(entries, worker, int(cfg.get("workers", 1)))
    reports = [results[item_id] for item_id in sorted(results)]
    if reports:
        write_report_csv(reports, out / "metrics.csv")
        write_summary_json(aggregate(reports), out / "summary.json")
        render_metric_figure(reports, out / "metrics.png")
        log.info("evaluated %d items -> %s", len(reports), out / "metrics.csv")
    return _exit_code(len(entries), errors)


# ---------------------------------------------------------------------------
# remix


def _estimate_dirs(cfg: dict) -> dict[str, Path]:
    estimates = cfg.get("estimates")
    if isinstance(estimates, dict) and estimates:
        return {str(cond): Path(str(d)) for cond, d in estimates.items()}
    if isinstance(estimates, (str, Path)) and str(estimates):
        return {str(cfg.get("condition", "system")): Path(str(estimates))}
    raise ConfigurationError(
        "estimates must be a directory (with --condition naming it) or a "
        "{condition: directory} mapping in the config"
    )


def cmd_remix(cfg: dict) -> int:
    entries, base = _load_items_manifest(_require(cfg, "manifest"))
    out = _out_dir(cfg)
    conditions = _estimate_dirs(cfg)
    for cond in conditions:
        if not _ITEM_ID_RE.match(cond):
            raise ConfigurationError(f"condition id {cond!r} has characters unsafe for filenames")
    mu_db = float(cfg.get("mu_db", -12.0))
    target_lufs = float(cfg.get("target_lufs", -23.0))
    threshold = float(cfg.get("activity_threshold_dbfs", -60.0))
    spec = RemixSpec(mu=db_to_linear(mu_db), target_lufs=target_lufs)

    missing = sorted(
        f"{cond}/{e['item_id']}"
        for cond, d in conditions.items()
        for e in entries
        if not (d / f"{e['item_id']}.wav").exists()
    )
    if missing:
        raise ConfigurationError(f"missing estimates: {', '.join(missing)}")

    def worker(entry: dict):
        item_id = str(entry["item_id"])
        stems = _load_stems(entry, base)
        rendered = [make_hidden_reference(stems, spec, item_id=item_id)]
        rendered.append(
            make_anchor(
                make_reference_condition(stems, spec),
                target_lufs,
                item_id=item_id,
                background_attenuation_db=spec.attenuation_db,
            )
        )
        for cond in sorted(conditions):
            estimate = load_wav(conditions[cond] / f"{item_id}.wav")
            rendered.append(
                prepare_condition(
                    stems,
                    estimate,
                    spec,
                    item_id=item_id,
                    condition_id=cond,
                    activity_threshold_dbfs=threshold,
                )
            )
        written = {}
        for item in rendered:
            name = f"{item_id}__{item.condition_id}.wav"
            save_wav(item.signal, out / name)
            written[item.condition_id] = {
                "path": name,
                "background_attenuation_db": item.background_attenuation_db,
                "normalization_gain_db": item.normalization_gain_db,
                "flags": list(item.flags),
            }
        return written

    results, errors = _map_items(entries, worker, int(cfg.get("workers", 1)))
    _write_json(
        {
            "mu_db": mu_db,
            "target_lufs": target_lufs,
            "items": {item_id: results[item_id] for item_id in sorted(results)},
        },
        out / "remix_manifest.json",
    )
    log.info("rendered %d conditions for %d/%d items", len(conditions) + 2, len(results), len(entries))
    return _exit_code(len(entries), errors)


# ---------------------------------------------------------------------------
# mushra


def cmd_mushra_gen(cfg: dict) -> int:
    manifest_path = Path(_require(cfg, "remix_manifest"))
    out = _out_dir(cfg)
    seed = int(cfg.get("seed", 0))
    num_listeners = int(cfg.get("num_listeners", 1))
    try:
        payload = json.loads(manifest_path.read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{manifest_path}: invalid JSON: {exc}") from exc
    items = payload.get("items")
    if not isinstance(items, dict) or not items:
        raise ConfigurationError(f"{manifest_path}: no rendered items")

    base = manifest_path.parent
    stimuli = {
        item: {cond: str(_resolve(base, info["path"])) for cond, info in conds.items()}
        for item, conds in items.items()
    }
    session = build_session(stimuli, seed=seed, num_listeners=num_listeners)

    # Copy stimuli under opaque names so neither the session file nor the
    # file names leak condition identity.
    stim_dir = out / "stimuli"
    stim_dir.mkdir(exist_ok=True)
    relabeled: dict = {}
    for item in session.items:
        relabeled[item] = {}
        for label in sorted(session.stimuli[item]):
            rel = f"stimuli/{item}__{label}.wav"
            shutil.copyfile(session.stimuli[item][label], out / rel)
            relabeled[item][label] = rel
    session = dataclasses.replace(session, stimuli=relabeled)
    session_path, key_path = session.save(out)
    log.info(
        "session with %d items x %d conditions -> %s (key: %s)",
        len(session.items), len(session.conditions), session_path, key_path,
    )
    return 0


def cmd_mushra_report(cfg: dict) -> int:
    ratings_path = _require(cfg, "ratings")
    out = _out_dir(cfg)
    session = None
    if cfg.get("session"):
        try:
            session = load_session(cfg["session"])
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise ConfigurationError(f"cannot load session from {cfg['session']}: {exc}") from exc
    try:
        records = load_ratings(ratings_path)
        if session is not None:
            records = resolve_labels(records, session.key)
    except ConfigurationError:
        raise
    except (OSError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc

    screening = post_screen(records, session)
    kept = set(screening.kept)
    rows = stats([r for r in records if r.listener_id in kept])
    write_stats_csv(rows, out / "mushra_stats.csv")
    if rows:
        render_mushra_figure(rows, out / "mushra_scores.png")
    _write_json(
        {"kept": sorted(screening.kept), "excluded": dict(sorted(screening.excluded.items()))},
        out / "screening.json",
    )
    for listener, reason in sorted(screening.excluded.items()):
        log.info("excluded %s: %s", listener, reason)
    log.info("kept %d listeners, %d stat rows", len(kept), len(rows))
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialogsep",
        description="Dialog separation evaluation and listening-test preparation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for all randomness in the command")
    common.add_argument("--workers", type=int, help="parallel item workers (default 1)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", parents=[common], help="resample, chunk, and split source items")
    p.add_argument("--manifest", help="items manifest JSON")
    p.add_argument("--chunk-seconds", type=float, dest="chunk_seconds")
    p.add_argument("--sample-rate", type=int, dest="sample_rate")
    p.add_argument("--excerpt-seconds", type=float, dest="excerpt_seconds",
                   help="also write a seeded epoch plan with this excerpt length")
    p.add_argument("--repeats", type=int, help="times each chunk is sampled per epoch")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("oracle", parents=[common], help="ideal-ratio-mask separation from true stems")
    p.add_argument("--manifest", help="items manifest JSON")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", parents=[common], help="scale-invariant separation metrics")
    p.add_argument("--manifest", help="items manifest JSON")
    p.add_argument("--estimates", help="directory of <item_id>.wav dialog estimates")
    p.add_argument("--stereo-mode", dest="stereo_mode", choices=("concat", "per_channel_mean"))
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("remix", parents=[common], help="render loudness-matched listening-test conditions")
    p.add_argument("--manifest", help="items manifest JSON")
    p.add_argument("--estimates", help="directory of <item_id>.wav dialog estimates")
    p.add_argument("--condition", help="condition id for --estimates (default: system)")
    p.add_argument("--mu-db", type=float, dest="mu_db",
                   help="background scale in dB for the reference remix (default -12)")
    p.add_argument("--target-lufs", type=float, dest="target_lufs",
                   help="loudness target for every condition (default -23)")
    p.set_defaults(func=cmd_remix)

    p = sub.add_parser("mushra-gen", parents=[common], help="build a blinded listening-test session")
    p.add_argument("--remix-manifest", dest="remix_manifest", help="remix_manifest.json from the remix command")
    p.add_argument("--num-listeners", type=int, dest="num_listeners")
    p.set_defaults(func=cmd_mushra_gen)

    p = sub.add_parser("mushra-report", parents=[common], help="screen listeners and compute statistics")
    p.add_argument("--ratings", help="ratings file (CSV or JSON lines)")
    p.add_argument("--session", help="session directory (resolves opaque labels via its key)")
    p.set_defaults(func=cmd_mushra_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(_merged_config(args))
    except ConfigurationError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
