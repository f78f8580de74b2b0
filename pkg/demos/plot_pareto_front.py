"""
The payoff polytope and its Pareto front
========================================

Every joint action of a game is a point in payoff space. Mixing over joint
actions fills in their convex hull, and the non-dominated part of that hull
is the Pareto front. A profile counts as Pareto optimal when its expected
payoff point lies within 0.1 of the front.
"""

import numpy as np

from malbench.figure import emit_polytope_figure
from malbench.games import PARETO_EXAMPLE, expected_payoffs
from malbench.solvers import build_payoff_polytope, distance_to_pareto_front, pareto_front

game = PARETO_EXAMPLE
print(game.payoffs[0])  # row player
print(game.payoffs[1])  # column player

poly = build_payoff_polytope(game)
front = pareto_front(poly)
print("hull vertices:", poly.vertex_points().tolist())
print("front edges:  ", [[list(map(float, a)), list(map(float, b))] for a, b in front.segments()])

# uniform play sits well inside the hull
uniform = [np.array([0.5, 0.5])] * 2
point = expected_payoffs(game, uniform)
print("uniform play ->", point, "distance", round(distance_to_pareto_front(point, front), 4))

# sliding the column player toward the second column walks onto the front
for q in (0.5, 0.8, 0.95, 1.0):
    p = expected_payoffs(game, [np.array([0.5, 0.5]), np.array([1 - q, q])])
    print(f"q={q:4.2f}  point={p}  distance={distance_to_pareto_front(p, front):.4f}")

emit_polytope_figure(game, "pareto-front.svg")
print("wrote pareto-front.svg")
