"""Acceptance gate: every criterion at its stated scale and tolerance.

Each test records one PASS/FAIL line (printed together at the end of the
pytest run) and then asserts the outcome. Criteria 5 to 7 run the
reduced-scale suites from ``configs/`` and take roughly 25 minutes on one core.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from helpers import (
    brute_force_pure,
    brute_is_nash,
    brute_max_welfare,
    grid_fairness,
    max_deviation_gain,
    random_2x2,
    sampled_distance,
    verdict,
)
from malbench.config import load_config
from malbench.games import PARETO_EXAMPLE, enumerate_distinct_2x2, expected_payoffs, random_strictly_ordinal
from malbench.harness import SuiteConfig, iter_suite
from malbench.learners import DISPLAY_NAMES
from malbench.metrics import is_nash
from malbench.solvers import (
    build_payoff_polytope,
    distance_to_pareto_front,
    find_nash,
    maximize_fairness,
    maximize_welfare,
    pareto_front,
)
from malbench.stats import paired_t_test, summarize
from malbench.store import write_store

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _fmt(summary, metrics):
    return "; ".join(
        f"{DISPLAY_NAMES[name]} " + " ".join(f"{m}={summary[name][m]:.4f}" for m in metrics) for name in summary
    )


def _suite(name):
    config = load_config(CONFIGS / f"{name}.yaml")
    start = time.perf_counter()
    rows = list(iter_suite(config))
    return config, rows, summarize(rows), time.perf_counter() - start


def test_criterion_1_enumeration():
    start = time.perf_counter()
    counts = [len(enumerate_distinct_2x2(c)) for c in ("no-conflict", "conflict", "all")]
    elapsed = time.perf_counter() - start
    ok = counts == [21, 57, 78] and elapsed < 1.0
    assert verdict(1, "enumeration counts 21/57/78 in under 1 s", ok, f"counts {counts}, {elapsed:.3f} s")


def test_criterion_2_metric_oracles():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    nash_mismatch = welfare_mismatch = 0
    for k in range(1000):
        game = random_2x2(rng) if k % 2 else random_strictly_ordinal((2, 2, 2), rng)
        if k % 5 == 0:
            afp = [np.eye(2)[rng.integers(2)] for _ in range(game.player_count)]
        else:
            afp = [rng.dirichlet([0.5, 0.5]) for _ in range(game.player_count)]
        nash_mismatch += is_nash(game, afp) != brute_is_nash(game.payoffs, afp)
        welfare_mismatch += maximize_welfare(game)[1] != brute_max_welfare(game)
    fair_err = 0.0
    for _ in range(100):
        game = random_2x2(rng)
        fair_err = max(fair_err, abs(maximize_fairness(game)[1] - grid_fairness(game, 0.001)))
    dist_err = 0.0
    for _ in range(200):
        game = random_2x2(rng)
        front = pareto_front(build_payoff_polytope(game))
        p, q = rng.random(2)
        x = expected_payoffs(game, [[1 - p, p], [1 - q, q]])
        dist_err = max(dist_err, abs(distance_to_pareto_front(x, front) - sampled_distance(front.polytope.points, x)))
    elapsed = time.perf_counter() - start
    ok = nash_mismatch == 0 and welfare_mismatch == 0 and fair_err <= 1e-4 and dist_err <= 1e-3 and elapsed < 300
    detail = (f"NE mismatches {nash_mismatch}/1000, welfare mismatches {welfare_mismatch}/1000, "
              f"fairness error {fair_err:.2e}, distance error {dist_err:.2e}, {elapsed:.1f} s")
    assert verdict(2, "metric-oracle equivalence", ok, detail)


def test_criterion_3_pareto_example():
    poly = build_payoff_polytope(PARETO_EXAMPLE)
    front = pareto_front(poly)
    vertices = {tuple(v) for v in poly.vertex_points()}
    edges = {frozenset(s) for s in front.segments()}
    d = distance_to_pareto_front((2.25, 2.25), front)
    ok = (
        vertices == {(1, 1), (4, 1), (1, 4), (3, 3)}
        and edges == {frozenset({(4.0, 1.0), (3.0, 3.0)}), frozenset({(3.0, 3.0), (1.0, 4.0)})}
        and abs(d - 1.0062) <= 1e-3
    )
    assert verdict(3, "payoff polytope, front edges and distance 1.0062", ok, f"distance {d:.6f}")


def test_criterion_4_equilibrium_soundness():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    worst, missing, empty, checked = 0.0, 0, 0, 0
    games = list(enumerate_distinct_2x2()) + [random_strictly_ordinal((2, 2, 2), rng) for _ in range(1000)]
    for game in games:
        eqs = find_nash(game)
        empty += not eqs.equilibria
        for e in eqs:
            worst = max(worst, max_deviation_gain(game.payoffs, e.profile))
            checked += 1
        if game.player_count == 2:
            found = {tuple(int(np.argmax(p)) for p in e.profile) for e in eqs if all(p.max() > 1 - 1e-9 for p in e.profile)}
            missing += len(set(brute_force_pure(game)) - found)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and missing == 0 and empty == 0 and elapsed < 120
    detail = f"{checked} equilibria, worst deviation gain {worst:.1e}, missed pure {missing}, {elapsed:.1f} s"
    assert verdict(4, "equilibrium solver soundness on 78 + 1000 games", ok, detail)


@pytest.mark.slow
def test_criterion_5_no_conflict_band():
    config, rows, summary, elapsed = _suite("no-conflict")
    assert (config.sweeps, config.repetitions) == (5, 20_000)
    failures = [
        f"{DISPLAY_NAMES[n]} {m}"
        for n, s in summary.items()
        for m, lo in (("conv", 0.95), ("fexp", 3.8), ("ne", 0.95), ("po", 0.90))
        if not s[m] >= lo
    ]
    ok = not failures and len(rows) == 15 * 21 * 2 * 5
    detail = f"{len(rows)} plays, {elapsed / 60:.1f} min; " + _fmt(summary, ("conv", "fexp", "ne", "po"))
    if failures:
        detail += "; below band: " + ", ".join(failures)
    assert verdict(5, "no-conflict band Conv>=0.95 Fexp>=3.8 NE>=0.95 PO>=0.90", ok, detail)


@pytest.mark.slow
def test_criterion_6_conflict_band():
    config, rows, summary, elapsed = _suite("conflict")
    assert (config.sweeps, config.repetitions) == (5, 20_000)
    bands = {"fexp": (2.8, 3.2), "welfare": (5.7, 6.4), "ne": (0.75, 0.95)}
    failures = [
        f"{DISPLAY_NAMES[n]} {m}" for n, s in summary.items() for m, (lo, hi) in bands.items() if not lo <= s[m] <= hi
    ]
    ok = not failures and len(rows) == 15 * 57 * 2 * 5
    detail = f"{len(rows)} plays, {elapsed / 60:.1f} min; " + _fmt(summary, ("fexp", "welfare", "ne"))
    if failures:
        detail += "; outside band: " + ", ".join(failures)
    assert verdict(6, "conflict band Fexp in [2.8,3.2], Welfare in [5.7,6.4], NE in [0.75,0.95]", ok, detail)


@pytest.mark.slow
def test_criterion_7_random_suite():
    config, rows, summary, elapsed = _suite("random")
    assert (config.games, config.repetitions, config.sweeps) == (100, 20_000, 1)
    assert len(rows) == 100 * len(config.roster)
    top = max(summary, key=lambda n: summary[n]["conv"])
    others = max(s["conv"] for n, s in summary.items() if n != "nashq")
    outside = [DISPLAY_NAMES[n] for n, s in summary.items() if not 5.3 <= s["fexp"] <= 6.1]
    ok = top == "nashq" and summary["nashq"]["conv"] > others and not outside
    detail = f"{len(rows)} plays, {elapsed / 60:.1f} min; " + _fmt(summary, ("conv", "fexp"))
    if outside:
        detail += "; Fexp outside [5.3,6.1]: " + ", ".join(outside)
    assert verdict(7, "random suite: NashQ converges most, Fexp in [5.3,6.1]", ok, detail)


@pytest.mark.slow
def test_criterion_8_determinism(tmp_path):
    differing = []
    for suite, extra in (("no-conflict", {}), ("conflict", {}), ("random", {"games": 20})):
        stores = []
        for label, workers in (("serial", 1), ("parallel-a", 2), ("parallel-b", 2)):
            config = SuiteConfig(suite=suite, sweeps=1, repetitions=200, seed=11, workers=workers, **extra)
            root = tmp_path / f"{suite}-{label}"
            write_store(root, config, iter_suite(config))
            stores.append(root)
        names = ["rows.jsonl", "rows.csv", "summary.csv"]
        base = {n: (stores[0] / n).read_bytes() for n in names}
        for other in stores[1:]:
            differing += [f"{other.name}/{n}" for n in names if (other / n).read_bytes() != base[n]]
        # manifests differ only in the recorded worker count
        a, b = (stores[1] / "manifest.json").read_bytes(), (stores[2] / "manifest.json").read_bytes()
        if a != b:
            differing.append(f"{suite} manifest")
    ok = not differing
    detail = "serial and two parallel runs per suite" + (f"; differing: {', '.join(differing)}" if differing else "")
    assert verdict(8, "byte-identical result stores for a fixed master seed", ok, detail)


def test_criterion_9_paired_t():
    res = paired_t_test([a + d for a, d in zip(range(5), (1, 2, 3, 4, 5))], list(range(5)))
    ok = abs(res.t - 4.243) <= 1e-3 and res.df == 4 and res.significant
    assert verdict(9, "paired t-test on differences 1..5", ok, f"t = {res.t:.4f}, df = {res.df}, p = {res.p_value:.4f}")
