"""Repeated matrix games: representation, classification, canonical forms.

Payoffs are stored as a float array of shape ``(n, m_1, ..., m_n)``. When a
game is flattened (serialization, canonical forms, kernels) the order is
player-major, then row-major over joint actions: the flat vector is
``payoffs.reshape(n, k)`` concatenated player by player.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np


class GameClass(enum.Enum):
    NO_CONFLICT = "no-conflict"
    CONFLICT = "conflict"


@dataclass(frozen=True, eq=False)
class RepeatedGame:
    """An n-player normal-form game played repeatedly.

    ``payoffs[i][a]`` is the payoff to player ``i`` at joint action ``a``.
    """

    payoffs: np.ndarray
    name: str = field(default="")

    def __post_init__(self):
        payoffs = np.array(self.payoffs, dtype=float)
        if payoffs.ndim < 3:
            raise ValueError("payoffs must have shape (n, m_1, ..., m_n) with n >= 2")
        n = payoffs.shape[0]
        if payoffs.ndim != n + 1:
            raise ValueError(
                f"payoff tensor for {n} players must have {n + 1} axes, got {payoffs.ndim}"
            )
        if any(m < 2 for m in payoffs.shape[1:]):
            raise ValueError("every player needs at least two actions")
        if not np.all(np.isfinite(payoffs)):
            raise ValueError("payoffs must be finite")
        payoffs.setflags(write=False)
        object.__setattr__(self, "payoffs", payoffs)

    @property
    def player_count(self) -> int:
        return self.payoffs.shape[0]

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(self.payoffs.shape[1:])

    @property
    def outcome_count(self) -> int:
        return int(np.prod(self.action_counts))

    def flat_payoffs(self) -> np.ndarray:
        """Payoffs as an ``(n, k)`` array, joint actions in row-major order."""
        return self.payoffs.reshape(self.player_count, self.outcome_count)

    def joint_actions(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(m) for m in self.action_counts)))

    def payoff(self, joint_action: Sequence[int]) -> np.ndarray:
        return self.payoffs[(slice(None), *joint_action)].copy()

    def __eq__(self, other):
        if not isinstance(other, RepeatedGame):
            return NotImplemented
        return self.payoffs.shape == other.payoffs.shape and bool(
            np.array_equal(self.payoffs, other.payoffs)
        )

    def __hash__(self):
        return hash((self.payoffs.shape, self.payoffs.tobytes()))

    def __repr__(self):
        shape = "x".join(map(str, self.action_counts))
        label = f" {self.name!r}" if self.name else ""
        return f"<RepeatedGame{label} {shape} {self.flat_payoffs().tolist()}>"


def from_bimatrix(row_payoffs, col_payoffs, name: str = "") -> RepeatedGame:
    return RepeatedGame(np.stack([np.asarray(row_payoffs), np.asarray(col_payoffs)]), name)


def validate_profile(game: RepeatedGame, profile: Sequence[Sequence[float]]) -> list[np.ndarray]:
    """Check a strategy profile against ``game`` and return it as arrays."""
    if len(profile) != game.player_count:
        raise ValueError(
            f"profile has {len(profile)} strategies for a {game.player_count}-player game"
        )
    out = []
    for i, (dist, m) in enumerate(zip(profile, game.action_counts)):
        dist = np.asarray(dist, dtype=float)
        if dist.shape != (m,):
            raise ValueError(f"player {i} strategy has shape {dist.shape}, expected ({m},)")
        if np.any(dist < -1e-12) or abs(dist.sum() - 1.0) > 1e-9:
            raise ValueError(f"player {i} strategy is not a probability distribution: {dist}")
        out.append(dist)
    return out


def outcome_distribution(profile: Sequence[np.ndarray]) -> np.ndarray:
    """Product distribution over joint actions, shaped like the action grid."""
    dist = np.ones(())
    for p in profile:
        dist = np.multiply.outer(dist, p)
    return dist


def expected_payoff(game: RepeatedGame, profile: Sequence[Sequence[float]], player: int) -> float:
    """Exact multilinear expected payoff ``U_i(pi)`` of ``player``."""
    dists = validate_profile(game, profile)
    value = game.payoffs[player]
    # contract the last axis first so every step is a matrix-vector product
    for p in reversed(dists):
        value = value @ p
    return float(value)


def expected_payoffs(game: RepeatedGame, profile: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([expected_payoff(game, profile, i) for i in range(game.player_count)])


def pure_profile(game: RepeatedGame, joint_action: Sequence[int]) -> list[np.ndarray]:
    return [np.eye(m)[a] for m, a in zip(game.action_counts, joint_action)]


def is_ordinal(game: RepeatedGame) -> bool:
    """Every payoff is an integer rank in ``1..k``."""
    k = game.outcome_count
    p = game.payoffs
    return bool(np.all(p == np.round(p)) and p.min() >= 1 and p.max() <= k)


def is_strictly_ordinal(game: RepeatedGame) -> bool:
    k = game.outcome_count
    ranks = np.arange(1, k + 1)
    return all(np.array_equal(np.sort(u), ranks) for u in game.flat_payoffs())


def most_preferred(game: RepeatedGame, player: int) -> frozenset[int]:
    """Flat indices of the joint actions at which ``player`` gets its maximum."""
    u = game.flat_payoffs()[player]
    return frozenset(np.flatnonzero(u == u.max()).tolist())


def classify(game: RepeatedGame) -> GameClass:
    """No-conflict iff all players share the same set of most preferred outcomes.

    Accepts ordinal games with ties (such as the Pareto-front example game);
    for strictly ordinal games each set is the single rank-k cell.
    """
    if not is_ordinal(game):
        raise ValueError("classify requires ordinal payoffs (integer ranks 1..k)")
    first = most_preferred(game, 0)
    if all(most_preferred(game, i) == first for i in range(1, game.player_count)):
        return GameClass.NO_CONFLICT
    return GameClass.CONFLICT


# -- structural transformations of 2x2 games -------------------------------


def _require_2x2(game: RepeatedGame) -> None:
    if game.action_counts != (2, 2):
        raise ValueError(f"structural transformations need a 2x2 game, got {game.action_counts}")


def swap_rows(game: RepeatedGame) -> RepeatedGame:
    _require_2x2(game)
    return RepeatedGame(game.payoffs[:, ::-1, :], game.name)


def swap_columns(game: RepeatedGame) -> RepeatedGame:
    _require_2x2(game)
    return RepeatedGame(game.payoffs[:, :, ::-1], game.name)


def swap_players(game: RepeatedGame) -> RepeatedGame:
    """Exchange the players: new u1(a, b) = u2(b, a), new u2(a, b) = u1(b, a)."""
    _require_2x2(game)
    u1, u2 = game.payoffs
    return RepeatedGame(np.stack([u2.T, u1.T]), game.name)


def orbit(game: RepeatedGame) -> list[RepeatedGame]:
    """The 8 images of ``game`` under row, column and player swaps."""
    out = []
    for players in (False, True):
        g = swap_players(game) if players else game
        for rows, cols in itertools.product((False, True), repeat=2):
            h = swap_rows(g) if rows else g
            out.append(swap_columns(h) if cols else h)
    return out


def canonical_key(game: RepeatedGame) -> tuple[float, ...]:
    """Flattened payoffs of the orbit member that is lexicographically largest.

    Equivalently the smallest key under the negated-payoff flattening. The
    largest first entry puts player 1's top outcome at (row 1, column 1).
    """
    return max(tuple(g.payoffs.ravel().tolist()) for g in orbit(game))


def canonical_form(game: RepeatedGame) -> RepeatedGame:
    """Orbit representative with the lexicographically largest flattened payoffs."""
    key = canonical_key(game)
    return RepeatedGame(np.array(key).reshape(2, 2, 2), game.name)


@lru_cache(maxsize=None)
def _distinct_2x2() -> tuple[RepeatedGame, ...]:
    seen = set()
    for p1 in itertools.permutations(range(1, 5)):
        for p2 in itertools.permutations(range(1, 5)):
            g = RepeatedGame(np.array([p1, p2], dtype=float).reshape(2, 2, 2))
            seen.add(canonical_key(g))
    return tuple(RepeatedGame(np.array(k).reshape(2, 2, 2)) for k in sorted(seen, reverse=True))


def enumerate_distinct_2x2(which: GameClass | str | None = None) -> list[RepeatedGame]:
    """All structurally distinct strictly ordinal 2x2 games, in canonical order.

    ``which`` selects a class (``GameClass`` or ``"no-conflict"``/``"conflict"``);
    ``None`` or ``"all"`` returns all 78. Games are named ``nc00..nc20`` and
    ``c00..c56`` by their position within their class.
    """
    if which == "all":
        which = None
    if isinstance(which, str):
        which = GameClass(which)
    counters = {GameClass.NO_CONFLICT: 0, GameClass.CONFLICT: 0}
    out = []
    for g in _distinct_2x2():
        cls = classify(g)
        prefix = "nc" if cls is GameClass.NO_CONFLICT else "c"
        name = f"{prefix}{counters[cls]:02d}"
        counters[cls] += 1
        if which is None or cls is which:
            out.append(RepeatedGame(g.payoffs, name))
    return out


def random_strictly_ordinal(
    action_counts: Sequence[int], rng: np.random.Generator, name: str = ""
) -> RepeatedGame:
    """Each player's payoffs are an independent uniform permutation of 1..k."""
    shape = tuple(int(m) for m in action_counts)
    k = int(np.prod(shape))
    payoffs = np.stack([rng.permutation(k) + 1 for _ in shape]).astype(float)
    return RepeatedGame(payoffs.reshape(len(shape), *shape), name)


# -- serialization ----------------------------------------------------------


def _number(x: float):
    return int(x) if float(x).is_integer() else float(x)


def game_to_dict(game: RepeatedGame) -> dict:
    return {
        "name": game.name,
        "players": game.player_count,
        "action_counts": list(game.action_counts),
        "payoffs": [[_number(x) for x in row] for row in game.flat_payoffs()],
    }


def game_from_dict(doc: dict) -> RepeatedGame:
    n = int(doc["players"])
    counts = tuple(int(m) for m in doc["action_counts"])
    if len(counts) != n or len(doc["payoffs"]) != n:
        raise ValueError("players, action_counts and payoffs disagree on the player count")
    flat = np.array(doc["payoffs"], dtype=float)
    if flat.shape != (n, int(np.prod(counts))):
        raise ValueError(f"payoff arrays have shape {flat.shape}, expected ({n}, {np.prod(counts)})")
    return RepeatedGame(flat.reshape(n, *counts), doc.get("name", ""))


def dumps_game(game: RepeatedGame) -> str:
    return json.dumps(game_to_dict(game), indent=2) + "\n"


def loads_game(text: str) -> RepeatedGame:
    return game_from_dict(json.loads(text))


def save_game(game: RepeatedGame, path: str | Path) -> None:
    Path(path).write_text(dumps_game(game))


def load_game(path: str | Path) -> RepeatedGame:
    return loads_game(Path(path).read_text())


# -- reference games --------------------------------------------------------

PARETO_EXAMPLE = from_bimatrix([[1, 4], [1, 3]], [[1, 1], [4, 3]], "pareto-example")
PRISONERS_DILEMMA = from_bimatrix([[3, 1], [4, 2]], [[3, 4], [1, 2]], "prisoners-dilemma")
CHICKEN = from_bimatrix([[3, 2], [4, 1]], [[3, 4], [2, 1]], "chicken")
