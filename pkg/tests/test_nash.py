import itertools

import numpy as np
import pytest

from malbench.games import CHICKEN, PRISONERS_DILEMMA, RepeatedGame, enumerate_distinct_2x2, random_strictly_ordinal
from malbench.solvers.nash import (
    VERIFY_TOL,
    equilibrium_violation,
    find_nash,
    find_nash_2x2,
    find_nash_2x2x2,
)


def brute_force_pure(game):
    """Pure equilibria by checking every unilateral pure deviation."""
    out = []
    for joint in game.joint_actions():
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


def as_joint(profile):
    return tuple(int(np.argmax(p)) for p in profile)


def is_pure(profile):
    return all(np.isclose(p.max(), 1.0) for p in profile)


def test_prisoners_dilemma_unique():
    eqs = find_nash_2x2(PRISONERS_DILEMMA)
    assert len(eqs.equilibria) == 1
    assert as_joint(eqs.equilibria[0].profile) == (1, 1)


def test_matching_pennies(pennies):
    eqs = find_nash_2x2(pennies)
    assert len(eqs.equilibria) == 1
    for p in eqs.equilibria[0].profile:
        assert p == pytest.approx([0.5, 0.5])


def test_example_pure_equilibria(pareto_game):
    eqs = find_nash_2x2(pareto_game)
    pure = {as_joint(e.profile) for e in eqs.equilibria if is_pure(e.profile)}
    assert pure == {(0, 0), (0, 1), (1, 0)}
    assert (1, 1) not in pure
    assert eqs.degenerate


def test_chicken_three_equilibria():
    eqs = find_nash_2x2(CHICKEN)
    pure = {as_joint(e.profile) for e in eqs.equilibria if is_pure(e.profile)}
    assert pure == {(0, 1), (1, 0)}
    mixed = [e for e in eqs.equilibria if not is_pure(e.profile)]
    assert len(mixed) == 1 and mixed[0].profile[0] == pytest.approx([0.5, 0.5])


def test_shape_checks(pareto_game, rng):
    with pytest.raises(ValueError):
        find_nash_2x2x2(pareto_game)
    with pytest.raises(ValueError):
        find_nash_2x2(random_strictly_ordinal((2, 2, 2), rng))


def test_dominant_three_player():
    # every player's payoff depends only on its own action: action 1 dominates
    u = np.zeros((3, 2, 2, 2))
    for a in itertools.product((0, 1), repeat=3):
        for i in range(3):
            u[(i, *a)] = 1 + 3 * a[i] + a[(i + 1) % 3]
    eqs = find_nash_2x2x2(RepeatedGame(u))
    assert [as_joint(e.profile) for e in eqs.equilibria] == [(1, 1, 1)]


def test_constructed_best_response_composition():
    # players 2 and 3 have dominant actions (1 and 0); player 1 best-responds to them
    u = np.zeros((3, 2, 2, 2))
    for a in itertools.product((0, 1), repeat=3):
        u[(1, *a)] = 5 if a[1] == 1 else 1
        u[(2, *a)] = 5 if a[2] == 0 else 1
        u[(0, *a)] = 7 if (a[0] == 1 and a[1] == 1 and a[2] == 0) else 2 + a[0] * 0.5 * (a[1] - a[2])
    eqs = find_nash_2x2x2(RepeatedGame(u))
    assert [as_joint(e.profile) for e in eqs.equilibria] == [(1, 1, 0)]
    assert equilibrium_violation(RepeatedGame(u), eqs.equilibria[0].profile) == 0


def test_all_distinct_2x2_games_sound_and_complete():
    for g in enumerate_distinct_2x2():
        eqs = find_nash(g)
        assert eqs.equilibria and not eqs.failed
        for e in eqs.equilibria:
            assert equilibrium_violation(g, e.profile) <= VERIFY_TOL
        found = {as_joint(e.profile) for e in eqs.equilibria if is_pure(e.profile)}
        assert set(brute_force_pure(g)) <= found


def test_random_three_player_games_sound():
    rng = np.random.default_rng(2024)
    for _ in range(300):
        g = random_strictly_ordinal((2, 2, 2), rng)
        eqs = find_nash_2x2x2(g)
        assert eqs.equilibria
        for e in eqs.equilibria:
            assert equilibrium_violation(g, e.profile) <= VERIFY_TOL
        pure = {as_joint(e.profile) for e in eqs.equilibria if is_pure(e.profile)}
        assert set(brute_force_pure(g)) <= pure


def test_equilibria_are_deterministic(rng):
    g = random_strictly_ordinal((2, 2, 2), rng)
    a = [e.profile for e in find_nash(g).equilibria]
    b = [e.profile for e in find_nash(g).equilibria]
    assert len(a) == len(b)
    for x, y in zip(a, b):
        for p, q in zip(x, y):
            assert np.array_equal(p, q)
