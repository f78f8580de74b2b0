import numpy as np
import pytest

from helpers import grid_fairness, grid_fairness3, random_2x2
from malbench.games import RepeatedGame, enumerate_distinct_2x2, expected_payoffs, random_strictly_ordinal
from malbench.solvers.social import best_pure_response, fairness, maximize_fairness, maximize_welfare, welfare


def test_example_welfare_and_fairness(pareto_game, oracles):
    profile, w = maximize_welfare(pareto_game)
    assert w == oracles["example_max_welfare"]
    assert [int(np.argmax(x)) for x in profile] == [1, 1]
    _, f = maximize_fairness(pareto_game)
    assert f == pytest.approx(oracles["example_max_fairness_grid_0p001"], abs=1e-6)


def test_no_conflict_optima():
    for game in enumerate_distinct_2x2("no-conflict"):
        assert maximize_welfare(game)[1] == 8
        assert maximize_fairness(game)[1] == pytest.approx(16)
    rng = np.random.default_rng(3)
    found = 0
    while found < 5:
        g = random_strictly_ordinal((2, 2, 2), rng)
        tops = [np.unravel_index(np.argmax(g.payoffs[i]), g.action_counts) for i in range(3)]
        if len(set(tops)) == 1:
            found += 1
            assert maximize_welfare(g)[1] == 24
            assert maximize_fairness(g)[1] == pytest.approx(512)
    assert found == 5


def test_fairness_matches_fine_grid(rng):
    for _ in range(100):
        g = random_2x2(rng)
        _, f = maximize_fairness(g)
        assert f == pytest.approx(grid_fairness(g, 0.001), abs=1e-4)


def test_fairness_three_players_beats_grid(rng):
    for _ in range(20):
        g = random_strictly_ordinal((2, 2, 2), rng)
        best = grid_fairness3(g, 0.02)
        profile, f = maximize_fairness(g)
        assert f >= best - 1e-9
        assert fairness(g, profile) == pytest.approx(f)


def test_best_response_matches_simplex_grid(rng):
    grid = np.linspace(0, 1, 101)
    for _ in range(50):
        g = random_strictly_ordinal((2, 2, 2), rng)
        profile = [rng.dirichlet([1, 1]) for _ in range(3)]
        for i in range(3):
            action, value = best_pure_response(g, i, profile)
            best = -np.inf
            for w in grid:
                trial = list(profile)
                trial[i] = np.array([1 - w, w])
                best = max(best, expected_payoffs(g, trial)[i])
            assert value == pytest.approx(best, abs=1e-12)
            trial = list(profile)
            trial[i] = np.eye(2)[action]
            assert expected_payoffs(g, trial)[i] == pytest.approx(value)


def test_best_response_tie_goes_to_lowest_index():
    g = RepeatedGame(np.array([[[1.0, 1.0], [1.0, 1.0]], [[1.0, 2.0], [3.0, 4.0]]]))
    assert best_pure_response(g, 0, [[0.5, 0.5], [0.5, 0.5]]) == (0, 1.0)


def test_welfare_of_profile(pareto_game):
    assert welfare(pareto_game, [[0, 1], [0, 1]]) == 6
    assert welfare(pareto_game, [[0.5, 0.5], [0.5, 0.5]]) == pytest.approx(4.5)
