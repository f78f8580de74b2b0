"""
A small tournament
==================

Every pair of learners (self-pairs included) plays every no-conflict game,
once per seating order. The table averages each algorithm over all of its
seats; pairs of algorithms are compared with a paired t-test over matching
(game, sweep, seating) keys.
"""

from malbench.harness import SuiteConfig, iter_suite
from malbench.report import ReportTable
from malbench.stats import compare

config = SuiteConfig(suite="no-conflict", sweeps=1, repetitions=2000, roster=("jal", "wolfphc", "regmat"), seed=5)
rows = list(iter_suite(config))
print(len(rows), "plays")

table = ReportTable.from_rows(config.suite, rows)
print(table.to_text())

res = compare(rows, "fexp", "jal", "regmat")
print(f"JAL vs RegMat on Fexp: t={res.t:.3f} df={res.df} p={res.p_value:.3g}")

# the same rows, run through the CLI, would be
#   malbench run configs/minimal.yaml && malbench report malbench-output/no-conflict-seed7
