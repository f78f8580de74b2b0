"""Per-play records and the seven play metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .games import RepeatedGame, expected_payoffs, validate_profile
from .solvers.polytope import ParetoFront, build_payoff_polytope, distance_to_pareto_front, pareto_front
from .solvers.social import best_pure_response, maximize_fairness, maximize_welfare

CONVERGENCE_TOL = 0.05
RATIO_THRESHOLD = 1.05
PARETO_DISTANCE = 0.1

# which recorded distribution the metrics read
POLICY = "policy"
SELECTION = "selection"


@dataclass
class PlayRecord:
    """One play: per-step strategies, joint actions and joint payoffs.

    ``strategies[t, i, :m_i]`` is player i's exploration-free policy before
    step t; ``selections`` holds the distribution the action was sampled from.
    """

    game: RepeatedGame
    learners: tuple[str, ...]
    seed: int
    strategies: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    selections: np.ndarray | None = None
    solver_failures: tuple[int, ...] = ()
    failed: bool = False
    error: str = ""

    @property
    def horizon(self) -> int:
        return int(self.actions.shape[0])

    def distributions(self, source: str = POLICY) -> np.ndarray:
        if source == POLICY:
            return self.strategies
        if source == SELECTION:
            if self.selections is None:
                raise ValueError("this play did not record selection distributions")
            return self.selections
        raise ValueError(f"unknown strategy source {source!r}; use 'policy' or 'selection'")


def final_window_start(t_f: int) -> int:
    """1-based first step of the final 20% window: ceil(0.8 t_f)."""
    if t_f < 5:
        raise ValueError(f"horizon must be at least 5, got {t_f}")
    return min(max((4 * t_f + 4) // 5, 1), t_f)


def _window(play: PlayRecord) -> slice:
    return slice(final_window_start(play.horizon) - 1, play.horizon)


def converged(play: PlayRecord, player: int, source: str = POLICY) -> bool:
    """Strategy stays within 5% of its value at the window start throughout the window."""
    m = play.game.action_counts[player]
    window = play.distributions(source)[_window(play), player, :m]
    return bool(np.all(np.abs(window - window[0]) <= CONVERGENCE_TOL))


def final_expected_payoff(play: PlayRecord, player: int) -> float:
    return float(play.rewards[_window(play), player].mean())


def averaged_final_profile(play: PlayRecord, source: str = POLICY) -> list[np.ndarray]:
    window = play.distributions(source)[_window(play)]
    return [window[:, i, :m].mean(axis=0) for i, m in enumerate(play.game.action_counts)]


def welfare_and_fairness(final_payoffs: Sequence[float]) -> tuple[float, float]:
    return float(sum(final_payoffs)), float(math.prod(final_payoffs))


@dataclass
class GameAnalysis:
    """Everything about a game the solution-type metrics need, computed once."""

    front: ParetoFront
    max_welfare: float
    max_fairness: float


@lru_cache(maxsize=512)
def analyse(game: RepeatedGame) -> GameAnalysis:
    front = pareto_front(build_payoff_polytope(game))
    _, w = maximize_welfare(game)
    _, f = maximize_fairness(game)
    return GameAnalysis(front, w, f)


def _ratio_ok(best: float, value: float) -> bool | None:
    if value <= 0:
        return None
    return bool(best / value <= RATIO_THRESHOLD)


def is_nash(game: RepeatedGame, afp) -> bool | None:
    """Every player's best-response value is within 5% of its value at the AFP.

    Returns None when some player's AFP value is not positive.
    """
    dists = validate_profile(game, afp)
    values = expected_payoffs(game, dists)
    verdict = True
    for i in range(game.player_count):
        _, best = best_pure_response(game, i, dists)
        ok = _ratio_ok(best, values[i])
        if ok is None:
            return None
        verdict = verdict and ok
    return verdict


def pareto_distance(game: RepeatedGame, afp) -> float:
    point = expected_payoffs(game, validate_profile(game, afp))
    return distance_to_pareto_front(point, analyse(game).front)


def is_pareto_optimal(game: RepeatedGame, afp) -> bool:
    return bool(pareto_distance(game, afp) <= PARETO_DISTANCE)


def is_welfare_optimal(game: RepeatedGame, afp) -> bool | None:
    values = expected_payoffs(game, validate_profile(game, afp))
    return _ratio_ok(analyse(game).max_welfare, float(values.sum()))


def is_fairness_optimal(game: RepeatedGame, afp) -> bool | None:
    values = expected_payoffs(game, validate_profile(game, afp))
    return _ratio_ok(analyse(game).max_fairness, float(np.prod(values)))


@dataclass
class MetricsReport:
    converged: tuple[bool, ...]
    final_payoffs: tuple[float, ...]
    welfare: float
    fairness: float
    afp: list[np.ndarray] = field(repr=False)
    ne: bool | None
    po: bool
    wo: bool | None
    fo: bool | None

    def as_dict(self) -> dict:
        return {
            "converged": list(self.converged),
            "final_payoffs": list(self.final_payoffs),
            "welfare": self.welfare,
            "fairness": self.fairness,
            "afp": [p.tolist() for p in self.afp],
            "ne": self.ne,
            "po": self.po,
            "wo": self.wo,
            "fo": self.fo,
        }


def evaluate(play: PlayRecord, source: str = POLICY) -> MetricsReport:
    game = play.game
    n = game.player_count
    r = tuple(final_expected_payoff(play, i) for i in range(n))
    w, f = welfare_and_fairness(r)
    afp = averaged_final_profile(play, source)
    return MetricsReport(
        converged=tuple(converged(play, i, source) for i in range(n)),
        final_payoffs=r,
        welfare=w,
        fairness=f,
        afp=afp,
        ne=is_nash(game, afp),
        po=is_pareto_optimal(game, afp),
        wo=is_welfare_optimal(game, afp),
        fo=is_fairness_optimal(game, afp),
    )
