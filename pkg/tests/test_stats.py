import math

import numpy as np
import pytest
from scipy import stats as sps

from malbench.harness import ResultRow
from malbench.stats import (
    aggregate_overall,
    compare,
    equivalence_groups,
    group_notation,
    paired_t_test,
    per_algorithm_values,
    summarize,
)


def row(game, team, payoffs, sweep=0, perm=0, focal=None, **flags):
    values = dict(converged=(True,) * len(team), ne=True, po=True, wo=True, fo=True)
    values.update(flags)
    return ResultRow("no-conflict", game, tuple(team), sweep, perm, 0, focal, final_payoffs=tuple(payoffs),
                     welfare=float(sum(payoffs)), fairness=float(np.prod(payoffs)), **values)


def test_paired_t_worked_example(oracles):
    res = paired_t_test([2, 4, 6, 8, 10], [1, 2, 3, 4, 5])
    assert res.t == pytest.approx(oracles["paired_t_1_to_5"], abs=1e-9)
    assert res.df == 4 and res.significant
    assert res.p_value == pytest.approx(2 * sps.t.sf(res.t, 4))


def test_paired_t_degenerate_cases():
    same = paired_t_test([1, 2, 3], [1, 2, 3])
    assert not same.significant and same.p_value == 1.0
    shift = paired_t_test([1.5, 2.5, 3.5], [1, 2, 3])
    assert shift.significant and math.isinf(shift.t)
    with pytest.raises(ValueError):
        paired_t_test([1], [2])
    with pytest.raises(ValueError):
        paired_t_test([1, 2], [1, 2, 3])


def test_matches_scipy_ttest_rel(rng):
    for _ in range(20):
        a, b = rng.normal(size=12), rng.normal(size=12)
        ours = paired_t_test(a, b)
        ref = sps.ttest_rel(a, b)
        assert ours.t == pytest.approx(ref.statistic) and ours.p_value == pytest.approx(ref.pvalue)


def test_summary_counts_every_seat_and_skips_failures():
    rows = [row("g", ("jal", "cjal"), (4, 2)), row("g", ("cjal", "jal"), (3, 4), perm=1, po=False)]
    rows.append(ResultRow("no-conflict", "g", ("jal", "cjal"), 1, 0, 0, failed=True, error="x"))
    s = summarize(rows)
    assert s["jal"]["fexp"] == 4.0 and s["cjal"]["fexp"] == 2.5
    assert s["jal"]["po"] == 0.5 and s["jal"]["plays"] == 3 and s["jal"]["failed"] == 1
    assert per_algorithm_values(rows, "welfare")["jal"] == [6.0, 7.0]
    with pytest.raises(KeyError):
        per_algorithm_values(rows, "speed")


def test_focal_seat_only():
    rows = [row("r0", ("jal", "nashq", "nashq"), (5, 1, 1), focal=0)]
    s = summarize(rows)
    assert set(s) == {"jal"} and s["jal"]["fexp"] == 5.0


def test_compare_and_groups():
    rows = []
    for k in range(5):
        rows.append(row(f"g{k}", ("jal", "cjal"), (k + 2.0, 1.0)))
        rows.append(row(f"g{k}", ("regmat", "nashq"), (1.0, 1.0)))
    assert compare(rows, "fexp", "jal", "cjal").t == pytest.approx(4.242640687119285)
    groups = equivalence_groups(rows, "fexp")
    assert groups == [["jal"], ["cjal", "nashq", "regmat"]]
    assert group_notation(groups, {"jal": "JAL"}) == "JAL, cjal / nashq / regmat"
    with pytest.raises(KeyError):
        compare(rows, "fexp", "jal", "wolfphc")


def test_overall_normalization():
    table = {"jal": {"conv": 1.0, "fexp": 3.0, "ne": 1.0, "po": 0.5, "wo": 0.5, "fo": 0.5}}
    out = aggregate_overall({"no-conflict": table, "conflict": table})
    assert out["jal"]["payoff"] == pytest.approx(0.75)
    assert out["jal"]["missing"] == ["random"]
    rnd = {"jal": dict(table["jal"], fexp=8.0)}
    out = aggregate_overall({"no-conflict": table, "conflict": table, "random": rnd})
    assert out["jal"]["payoff"] == pytest.approx((0.75 + 0.75 + 1.0) / 3)
    four = {"jal": dict(table["jal"], fexp=4.0)}
    assert aggregate_overall({"conflict": four})["jal"]["payoff"] == 1.0


def test_averages_ignore_row_order(rng):
    rows = [row(f"g{k}", ("jal", "cjal"), tuple(rng.random(2) * 4), sweep=k % 3, po=bool(k % 2)) for k in range(30)]
    shuffled = [rows[i] for i in rng.permutation(len(rows))]
    assert summarize(rows) == summarize(shuffled)
