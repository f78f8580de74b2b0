"""On-disk result stores: rows as JSON lines, a manifest, and CSV exports.

A store directory holds ``manifest.json``, ``rows.jsonl``, ``rows.csv`` and
``summary.csv`` (plus ``logs/`` when per-step logs were requested). Nothing
time-dependent is written, so a rerun with the same seed reproduces every
byte.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import __version__
from .harness import ResultRow, SuiteConfig
from .stats import COLUMNS, METRICS, summarize

MANIFEST = "manifest.json"
ROWS = "rows.jsonl"
ROWS_CSV = "rows.csv"
SUMMARY_CSV = "summary.csv"
LOGS = "logs"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write_manifest(root: Path, config: SuiteConfig, complete: bool, rows: int) -> None:
    manifest = {
        "format": 1,
        "version": __version__,
        "suite": config.suite,
        "seed": config.seed,
        "config": config.as_dict(),
        "complete": complete,
        "rows": rows,
    }
    (root / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def write_store(root: str | Path, config: SuiteConfig, rows: Iterable[ResultRow]) -> int:
    """Stream ``rows`` into a store at ``root``; returns the row count.

    The manifest says ``complete: false`` until the last row is written, so
    an interrupted run leaves a readable but flagged partial store.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    for name in (ROWS, ROWS_CSV, SUMMARY_CSV):
        (root / name).unlink(missing_ok=True)
    _write_manifest(root, config, False, 0)
    count = 0
    written: list[ResultRow] = []
    with open(root / ROWS, "w") as fh:
        for row in rows:
            d = row.to_dict()
            if row.log is not None:
                logdir = root / LOGS
                logdir.mkdir(exist_ok=True)
                name = f"{count:07d}.npz"
                np.savez(logdir / name, **{k: v for k, v in row.log.items() if v is not None})
                d["log_file"] = f"{LOGS}/{name}"
                row.log = None
            fh.write(_dump(d) + "\n")
            fh.flush()
            written.append(row)
            count += 1
            if count % 500 == 0:
                _write_manifest(root, config, False, count)
    (root / ROWS_CSV).write_text(rows_csv(written))
    (root / SUMMARY_CSV).write_text(summary_csv(summarize(written)))
    _write_manifest(root, config, True, count)
    return count


@dataclass
class Store:
    root: Path
    manifest: dict
    rows: list[ResultRow]

    @property
    def complete(self) -> bool:
        return bool(self.manifest.get("complete"))

    @property
    def suite(self) -> str:
        return self.manifest["suite"]


def load_store(root: str | Path) -> Store:
    root = Path(root)
    manifest_path = root / MANIFEST
    if not manifest_path.exists():
        raise FileNotFoundError(f"no result store at {root} (missing {MANIFEST})")
    manifest = json.loads(manifest_path.read_text())
    rows = []
    path = root / ROWS
    if path.exists():
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    rows.append(ResultRow.from_dict(json.loads(line)))
    return Store(root, manifest, rows)


def load_log(root: str | Path, row_dict: dict) -> dict[str, np.ndarray]:
    with np.load(Path(root) / row_dict["log_file"]) as data:
        return {k: data[k] for k in data.files}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_csv(rows: Iterable[ResultRow]) -> str:
    """One line per counted seat, in full precision."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["suite", "game", "team", "sweep", "permutation", "seed", "seat", "algorithm", "failed",
                *COLUMNS.values()])
    for row in rows:
        for seat in row.seats():
            if row.failed:
                values = [None] * len(COLUMNS)
            else:
                values = [row.converged[seat], row.final_payoffs[seat], row.welfare, row.fairness,
                          row.ne, row.po, row.wo, row.fo]
            w.writerow([_cell(x) for x in (row.suite, row.game_id, "+".join(row.team), row.sweep,
                                           row.permutation, row.seed, seat, row.team[seat], row.failed,
                                           *values)])
    return out.getvalue()


def summary_csv(summary: dict[str, dict[str, float]]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["algorithm", *COLUMNS.values(), "plays", "failed"])
    for name in sorted(summary):
        entry = summary[name]
        w.writerow([name, *(_cell(entry.get(m)) for m in METRICS), entry.get("plays", 0), entry.get("failed", 0)])
    return out.getvalue()


def read_summary_csv(text: str) -> dict[str, dict[str, float]]:
    inverse = {v: k for k, v in COLUMNS.items()}
    out = {}
    for rec in csv.DictReader(io.StringIO(text)):
        name = rec.pop("algorithm")
        out[name] = {inverse.get(k, k): float(v) for k, v in rec.items() if v != ""}
    return out
