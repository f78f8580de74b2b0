"""Per-algorithm aggregation and paired significance tests."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as sps

from .harness import MAX_PAYOFF, ResultRow

METRICS = ("conv", "fexp", "welfare", "fairness", "ne", "po", "wo", "fo")
COLUMNS = {
    "conv": "Conv.",
    "fexp": "Fexp.",
    "welfare": "Welfare",
    "fairness": "Fairness",
    "ne": "NE",
    "po": "PO",
    "wo": "WO",
    "fo": "FO",
}
RATE_METRICS = ("conv", "ne", "po", "wo", "fo")


def _mean(values) -> float:
    # exactly rounded, so the result does not depend on row order
    values = list(values)
    return math.fsum(values) / len(values) if values else math.nan


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p_value: float
    significant: bool


def paired_t_test(sample_a: Sequence[float], sample_b: Sequence[float], level: float = 0.05) -> TTestResult:
    """Two-sided paired t-test on ``a - b``.

    Zero-variance differences are significant iff their mean is nonzero.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"paired samples differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("paired t-test needs at least two pairs")
    d = a - b
    n = d.size
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, n - 1, 1.0, False)
        return TTestResult(math.copysign(math.inf, mean), n - 1, 0.0, True)
    t = mean / (sd / math.sqrt(n))
    p = float(2.0 * sps.t.sf(abs(t), n - 1))
    return TTestResult(t, n - 1, p, p < level)


def _value(row: ResultRow, seat: int, metric: str) -> float | None:
    if metric == "conv":
        return float(row.converged[seat])
    if metric == "fexp":
        return row.final_payoffs[seat]
    if metric in ("welfare", "fairness"):
        return getattr(row, metric)
    flag = getattr(row, metric)
    return None if flag is None else float(flag)


def per_algorithm_values(rows: Iterable[ResultRow], metric: str) -> dict[str, list[float]]:
    """Every value an algorithm contributed: one per counted seat of each play."""
    if metric not in METRICS:
        raise KeyError(f"unknown metric {metric!r}; valid: {', '.join(METRICS)}")
    out: dict[str, list[float]] = defaultdict(list)
    for row in rows:
        if row.failed:
            continue
        for seat in row.seats():
            v = _value(row, seat, metric)
            if v is not None:
                out[row.team[seat]].append(v)
    return dict(out)


def summarize(rows: Iterable[ResultRow]) -> dict[str, dict[str, float]]:
    """Table rows: each metric averaged over all plays, games and teams of an algorithm."""
    rows = list(rows)
    table: dict[str, dict[str, float]] = defaultdict(dict)
    for metric in METRICS:
        for name, values in per_algorithm_values(rows, metric).items():
            table[name][metric] = _mean(values)
    for row in rows:
        for seat in row.seats():
            entry = table[row.team[seat]]
            entry["plays"] = entry.get("plays", 0) + 1
            entry["failed"] = entry.get("failed", 0) + int(row.failed)
    return dict(table)


def paired_samples(rows: Iterable[ResultRow], metric: str) -> dict[str, dict[tuple, float]]:
    """Per algorithm, the mean value at each (game, sweep, permutation) key."""
    if metric not in METRICS:
        raise KeyError(f"unknown metric {metric!r}; valid: {', '.join(METRICS)}")
    acc: dict[str, dict[tuple, list[float]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row.failed:
            continue
        key = (row.game_id, row.sweep, row.permutation)
        for seat in row.seats():
            v = _value(row, seat, metric)
            if v is not None:
                acc[row.team[seat]][key].append(v)
    return {name: {k: _mean(v) for k, v in keyed.items()} for name, keyed in acc.items()}


def compare(rows: Iterable[ResultRow], metric: str, first: str, second: str, level: float = 0.05) -> TTestResult:
    samples = paired_samples(rows, metric)
    for name in (first, second):
        if name not in samples:
            raise KeyError(f"algorithm {name!r} not present in the results")
    keys = sorted(set(samples[first]) & set(samples[second]))
    return paired_t_test([samples[first][k] for k in keys], [samples[second][k] for k in keys], level)


def equivalence_groups(rows: Iterable[ResultRow], metric: str, level: float = 0.05) -> list[list[str]]:
    """Algorithms ordered best first; neighbours join a group when no member differs significantly."""
    rows = list(rows)
    samples = paired_samples(rows, metric)
    means = {name: _mean(v.values()) for name, v in samples.items()}
    order = sorted(means, key=lambda name: (-means[name], name))
    groups: list[list[str]] = []
    for name in order:
        if groups:
            try:
                joins = all(not compare(rows, metric, name, other, level).significant for other in groups[-1])
            except ValueError:
                joins = False  # fewer than two shared keys: cannot claim equivalence
            if joins:
                groups[-1].append(name)
                continue
        groups.append([name])
    return groups


def group_notation(groups: Sequence[Sequence[str]], display: Mapping[str, str] | None = None) -> str:
    display = display or {}
    return ", ".join(" / ".join(display.get(n, n) for n in g) for g in groups)


def aggregate_overall(summaries: Mapping[str, Mapping[str, Mapping[str, float]]]) -> dict[str, dict[str, float | None]]:
    """Average each algorithm's rates over the suites; payoffs are first divided by the suite maximum.

    ``summaries`` maps suite name to the output of :func:`summarize`. A suite
    missing for an algorithm leaves a gap: that entry of ``suites`` is None.
    """
    names = sorted({name for table in summaries.values() for name in table})
    out: dict[str, dict[str, float | None]] = {}
    for name in names:
        parts = {m: [] for m in ("conv", "payoff", "ne", "po", "wo", "fo")}
        present = []
        for suite, table in summaries.items():
            if name not in table:
                continue
            present.append(suite)
            row = table[name]
            parts["payoff"].append(row["fexp"] / MAX_PAYOFF[suite])
            for m in RATE_METRICS:
                parts[m].append(row[m])
        entry: dict = {m: (_mean(v) if v else None) for m, v in parts.items()}
        entry["suites"] = present
        entry["missing"] = [s for s in ("no-conflict", "conflict", "random") if s not in present]
        out[name] = entry
    return out
