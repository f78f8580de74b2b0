"""Result tables in the benchmark's column layout."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .harness import ResultRow
from .learners import DISPLAY_NAMES, ROSTER
from .stats import COLUMNS, METRICS, aggregate_overall, equivalence_groups, group_notation, summarize

TITLES = {
    "no-conflict": "No-conflict games",
    "conflict": "Conflict games",
    "random": "Random 2x2x2 games",
}


def _order(names: Iterable[str]) -> list[str]:
    rank = {n: i for i, n in enumerate(ROSTER)}
    return sorted(names, key=lambda n: (rank.get(n, len(rank)), n))


@dataclass
class ReportTable:
    suite: str
    rows: dict[str, dict[str, float]]
    groups: dict[str, list[list[str]]] = field(default_factory=dict)
    complete: bool = True

    @classmethod
    def from_rows(cls, suite: str, rows: Iterable[ResultRow], complete: bool = True, groups: bool = True):
        rows = list(rows)
        table = cls(suite, summarize(rows), complete=complete)
        if groups:
            for metric in METRICS:
                try:
                    table.groups[metric] = equivalence_groups(rows, metric)
                except ValueError:
                    pass
        return table

    def to_text(self) -> str:
        names = _order(self.rows)
        width = max([len("Algorithm")] + [len(DISPLAY_NAMES.get(n, n)) for n in names])
        cols = list(COLUMNS.values())
        lines = [TITLES.get(self.suite, self.suite)]
        if not self.complete:
            lines.append("WARNING: incomplete result store; averages cover only the finished plays")
        lines.append("  ".join([f"{'Algorithm':<{width}}", *(f"{c:>8}" for c in cols)]))
        for name in names:
            entry = self.rows[name]
            cells = [_fmt(entry.get(m)) for m in METRICS]
            lines.append("  ".join([f"{DISPLAY_NAMES.get(name, name):<{width}}", *(f"{c:>8}" for c in cells)]))
        if self.groups:
            lines.append("")
            for metric, groups in self.groups.items():
                lines.append(f"{COLUMNS[metric]:<9} {group_notation(groups, DISPLAY_NAMES)}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["suite", "algorithm", *COLUMNS.values(), "complete"])
        for name in _order(self.rows):
            entry = self.rows[name]
            w.writerow([self.suite, name, *(repr(float(entry[m])) if m in entry else "" for m in METRICS),
                        int(self.complete)])
        return out.getvalue()


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.4f}"


def _pct(value) -> str:
    return "-" if value is None else f"{100 * value:.2f}%"


def overall_text(summaries: Mapping[str, Mapping[str, Mapping[str, float]]]) -> str:
    """Overall summary: payoff rate (normalized final payoff) and solution rates across suites."""
    overall = aggregate_overall(summaries)
    names = _order(overall)
    width = max([len("Algorithm")] + [len(DISPLAY_NAMES.get(n, n)) for n in names])
    heads = ["Conv.", "Payoff", "NE", "PO", "WO", "FO"]
    keys = ["conv", "payoff", "ne", "po", "wo", "fo"]
    lines = ["Overall (normalized)"]
    lines.append("  ".join([f"{'Algorithm':<{width}}", *(f"{h:>8}" for h in heads), "  missing"]))
    for name in names:
        e = overall[name]
        missing = ",".join(e["missing"]) or "-"
        lines.append("  ".join([f"{DISPLAY_NAMES.get(name, name):<{width}}", *(f"{_pct(e[k]):>8}" for k in keys),
                                f"  {missing}"]))
    return "\n".join(lines) + "\n"
