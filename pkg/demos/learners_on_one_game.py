"""
Five learners on one game
=========================

A single play pits two learners against each other for a fixed number of
steps. The last fifth of the play decides the outcome: whether the
strategies settled, what each side earned, and what kind of solution the
averaged strategies form.
"""

from malbench.games import classify, enumerate_distinct_2x2
from malbench.harness import run_play
from malbench.learners import DISPLAY_NAMES, ROSTER
from malbench.metrics import evaluate

# a conflict game: the row player prefers (r1,c1), the column player (r2,c2)
game = enumerate_distinct_2x2("conflict")[10]
print(game.name, classify(game).value)
print(game.payoffs)

for name in ROSTER:
    play = run_play(game, [name, name], 5000, seed=1)
    report = evaluate(play)
    afp = [p.round(2).tolist() for p in report.afp]
    print(f"{DISPLAY_NAMES[name]:9s} self-play  payoffs={tuple(round(r, 2) for r in report.final_payoffs)}"
          f"  converged={report.converged}  NE={report.ne}  PO={report.po}  AFP={afp}")

# the recorded strategies are kept per step; here is JAL's opening
play = run_play(game, ["jal", "wolfphc"], 2000, seed=3)
print("first joint actions:", play.actions[:8].tolist())
print("WOLF-PHC policy every 400 steps:", play.strategies[::400, 1, :2].round(3).tolist())
