"""Brute-force oracles shared by the unit and acceptance tests.

Nothing here calls the package's solvers; the checks use plain enumeration.
"""

import itertools

import numpy as np


def random_2x2(rng):
    from malbench.games import RepeatedGame

    u = np.stack([rng.permutation(4) + 1, rng.permutation(4) + 1]).astype(float)
    return RepeatedGame(u.reshape(2, 2, 2))


def expected(payoffs, profile):
    """Expected payoff of every player, by summing over joint actions."""
    n = len(profile)
    total = np.zeros(n)
    for joint in itertools.product(*(range(len(p)) for p in profile)):
        weight = np.prod([profile[i][a] for i, a in enumerate(joint)])
        total += weight * payoffs[(slice(None), *joint)]
    return total


def deviation_values(payoffs, profile, player):
    """Expected payoff of each pure deviation of one player."""
    out = []
    for a in range(len(profile[player])):
        trial = [np.asarray(p, float) for p in profile]
        trial[player] = np.eye(len(profile[player]))[a]
        out.append(expected(payoffs, trial)[player])
    return np.array(out)


def max_deviation_gain(payoffs, profile):
    values = expected(payoffs, profile)
    return max(deviation_values(payoffs, profile, i).max() - values[i] for i in range(len(profile)))


def brute_is_nash(payoffs, profile, ratio=1.05):
    """Pure-deviation check of the 5% equilibrium test; None when a value is not positive."""
    values = expected(payoffs, profile)
    if np.any(values <= 0):
        return None
    return all(deviation_values(payoffs, profile, i).max() / values[i] <= ratio for i in range(len(profile)))


def brute_force_pure(game):
    out = []
    for joint in itertools.product(*(range(m) for m in game.action_counts)):
        stable = True
        for i in range(game.player_count):
            for b in range(game.action_counts[i]):
                dev = list(joint)
                dev[i] = b
                if game.payoffs[(i, *dev)] > game.payoffs[(i, *joint)] + 1e-12:
                    stable = False
        if stable:
            out.append(joint)
    return out


def brute_max_welfare(game):
    return max(game.payoffs[(slice(None), *j)].sum() for j in itertools.product(*(range(m) for m in game.action_counts)))


def grid_fairness(game, step):
    """Max payoff product of a 2x2 game over a grid of mixed profiles."""
    p = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    P, Q = np.meshgrid(p, p, indexing="ij")

    def ev(u):
        return (1 - P) * (1 - Q) * u[0, 0] + (1 - P) * Q * u[0, 1] + P * (1 - Q) * u[1, 0] + P * Q * u[1, 1]

    u1, u2 = game.payoffs
    return float((ev(u1) * ev(u2)).max())


def grid_fairness3(game, step):
    """Max payoff product of a 2x2x2 game over a grid of mixed profiles."""
    p = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    mix = np.stack([1 - p, p], axis=1)
    values = [np.einsum("xa,yb,zc,abc->xyz", mix, mix, mix, game.payoffs[i]) for i in range(3)]
    return float((values[0] * values[1] * values[2]).max())


def segment_cloud(points, per_segment):
    """Dense samples on every segment between two payoff points, which covers every hull edge."""
    t = np.linspace(0.0, 1.0, per_segment)[:, None]
    parts = [points]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            parts.append(points[i] + t * (points[j] - points[i]))
    return np.vstack(parts)


def sampled_front(cloud):
    """Points of a 2-D cloud not dominated by another cloud point (sort and sweep)."""
    order = np.lexsort((-cloud[:, 1], -cloud[:, 0]))
    keep, best_y = [], -np.inf
    for y in cloud[order]:
        if y[1] > best_y + 1e-12:
            keep.append(y)
            best_y = y[1]
    return np.array(keep)


def sampled_distance(points, x, samples=10_000):
    """Distance from x to the non-dominated part of a ~10,000-point boundary sample."""
    pairs = len(points) * (len(points) - 1) // 2
    oracle = sampled_front(segment_cloud(points, max(samples // max(pairs, 1), 2)))
    return float(np.min(np.linalg.norm(oracle - np.asarray(x), axis=1)))


ACCEPTANCE: list[str] = []


def verdict(number, title, ok, detail=""):
    """Record one acceptance line; the terminal summary prints them all."""
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return ok
