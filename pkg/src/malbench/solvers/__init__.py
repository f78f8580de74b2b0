from .nash import EquilibriumList, equilibrium_violation, find_nash, find_nash_2x2, find_nash_2x2x2
from .polytope import (
    ParetoFront,
    PayoffPolytope,
    build_payoff_polytope,
    distance_to_pareto_front,
    pareto_front,
)
from .social import best_pure_response, maximize_fairness, maximize_welfare

__all__ = [
    "EquilibriumList",
    "ParetoFront",
    "PayoffPolytope",
    "best_pure_response",
    "build_payoff_polytope",
    "distance_to_pareto_front",
    "equilibrium_violation",
    "find_nash",
    "find_nash_2x2",
    "find_nash_2x2x2",
    "maximize_fairness",
    "maximize_welfare",
    "pareto_front",
]
