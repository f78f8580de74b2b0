"""Best responses and the welfare / fairness optima of a game."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from ..games import RepeatedGame, expected_payoff, pure_profile, validate_profile

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def action_values(game: RepeatedGame, player: int, profile: Sequence[Sequence[float]]) -> np.ndarray:
    """Expected payoff of each own action with the other players fixed at ``profile``."""
    dists = validate_profile(game, profile)
    u = np.moveaxis(game.payoffs[player], player, 0)
    for j in reversed(range(game.player_count)):
        if j == player:
            continue
        # after moveaxis the remaining axes keep their relative order
        u = u @ dists[j]
    return np.asarray(u, dtype=float)


def best_pure_response(game: RepeatedGame, player: int, profile: Sequence[Sequence[float]]) -> tuple[int, float]:
    """Maximizer of the player's (linear) payoff over its own simplex.

    The optimum of a linear objective over a simplex is attained at a
    vertex, so the best pure action solves the programme exactly.
    Ties go to the lowest action index. ``profile[player]`` is ignored.
    """
    values = action_values(game, player, profile)
    a = int(np.argmax(values))
    return a, float(values[a])


def maximize_welfare(game: RepeatedGame) -> tuple[list[np.ndarray], float]:
    """Sum of payoffs is multilinear, so a pure joint action is optimal."""
    welfare = game.payoffs.sum(axis=0)
    joint = np.unravel_index(int(np.argmax(welfare)), welfare.shape)
    return pure_profile(game, joint), float(welfare[joint])


def _fairness_binary(game: RepeatedGame, x: np.ndarray) -> float:
    profile = [np.array([1.0 - p, p]) for p in x]
    return float(np.prod([expected_payoff(game, profile, i) for i in range(game.player_count)]))


def fairness_grid(game: RepeatedGame, step: float) -> tuple[np.ndarray, float]:
    """Brute-force maximum of the payoff product over a grid of mixing probabilities."""
    n = game.player_count
    g = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    axes = np.stack([1.0 - g, g])  # (2, G)
    total = None
    for i in range(n):
        u = game.payoffs[i]
        for _ in range(n):
            # contract the first remaining action axis; the grid axis moves to the back
            u = np.tensordot(u, axes, axes=([0], [0]))
        total = u if total is None else total * u
    best = np.unravel_index(int(np.argmax(total)), total.shape)
    return g[list(best)], float(total[best])


def _golden_max(f, lo=0.0, hi=1.0, tol=1e-10):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    # endpoints guard against non-unimodal sections
    return max(((x, f(x)), (lo, f(lo)), (hi, f(hi))), key=lambda t: t[1])


def _coordinate_ascent(game: RepeatedGame, x: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    x = x.astype(float).copy()
    value = _fairness_binary(game, x)
    for _ in range(500):
        prev = value
        for j in range(len(x)):
            def along(p, j=j):
                y = x.copy()
                y[j] = p
                return _fairness_binary(game, y)

            p, v = _golden_max(along)
            if v > value:
                x[j], value = p, v
        if value - prev <= tol:
            break
    return x, value


def maximize_fairness(game: RepeatedGame, grid_step: float = 0.01) -> tuple[list[np.ndarray], float]:
    """Maximum of the product of expected payoffs over mixed profiles.

    The product is not multilinear, so the optimum may be interior.
    Coordinate-wise golden-section ascent is started from every pure profile,
    the uniform profile and the best point of a ``grid_step`` grid.
    """
    if any(m != 2 for m in game.action_counts) or game.player_count not in (2, 3):
        raise ValueError("maximize_fairness supports 2 or 3 players with two actions each")
    n = game.player_count
    starts = [np.array(c, dtype=float) for c in itertools.product((0.0, 1.0), repeat=n)]
    starts.append(np.full(n, 0.5))
    grid_x, _ = fairness_grid(game, grid_step)
    starts.append(grid_x)
    best_x, best_v = None, -np.inf
    for s in starts:
        x, v = _coordinate_ascent(game, s)
        if v > best_v:
            best_x, best_v = x, v
    return [np.array([1.0 - p, p]) for p in best_x], best_v


def welfare(game: RepeatedGame, profile) -> float:
    return float(sum(expected_payoff(game, profile, i) for i in range(game.player_count)))


def fairness(game: RepeatedGame, profile) -> float:
    return float(np.prod([expected_payoff(game, profile, i) for i in range(game.player_count)]))
