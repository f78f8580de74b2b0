"""Nash equilibria of two-action games with two or three players.

The numeric core works on flat payoff arrays ``u`` of shape ``(n, 2**n)``
(row-major joint actions, player 0 slowest) and describes a profile by
``x[i]``, the probability that player ``i`` plays action 1. It is compiled
with numba because NashQ re-solves its estimate game inside the play loop.

Supports are enumerated player by player (pure action 0, pure action 1,
mixed). Pure profiles come first in joint-action order, then supports with
one, two and three mixed players. Candidates with one or two mixed players
are solved from the linear indifference conditions; with three mixed
players the conditions reduce to a quadratic in the third player's
probability. Degenerate systems fall back to damped Newton iterations from
27 fixed starting points. Every candidate is re-verified before it is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..games import RepeatedGame, expected_payoff

MAX_EQUILIBRIA = 64
VERIFY_TOL = 1e-6
_INDIFF_TOL = 1e-12
_RANGE_TOL = 1e-9

FLAG_DEGENERATE = 1
FLAG_FAILED = 2


@njit(cache=True)
def action_values(u, i, x, n):
    """Expected payoff of player ``i`` for each of its two actions, others at ``x``."""
    v0 = 0.0
    v1 = 0.0
    for idx in range(1 << n):
        w = 1.0
        for j in range(n):
            if j == i:
                continue
            if (idx >> (n - 1 - j)) & 1:
                w *= x[j]
            else:
                w *= 1.0 - x[j]
        if (idx >> (n - 1 - i)) & 1:
            v1 += w * u[i, idx]
        else:
            v0 += w * u[i, idx]
    return v0, v1


@njit(cache=True)
def profile_value(u, i, x, n):
    v0, v1 = action_values(u, i, x, n)
    return (1.0 - x[i]) * v0 + x[i] * v1


@njit(cache=True)
def deviation_gain(u, x, n):
    """Largest gain any player can get by a unilateral pure deviation."""
    worst = 0.0
    for i in range(n):
        v0, v1 = action_values(u, i, x, n)
        here = (1.0 - x[i]) * v0 + x[i] * v1
        g = max(v0, v1) - here
        if g > worst:
            worst = g
    return worst


@njit(cache=True)
def _incentive(u, i, x, n):
    v0, v1 = action_values(u, i, x, n)
    return v1 - v0


@njit(cache=True)
def _bilinear(u, i, j, l, x, n):
    """Coefficients of D_i = a + b x_j + c x_l + d x_j x_l (others fixed at x)."""
    y = x.copy()
    y[j] = 0.0
    y[l] = 0.0
    d00 = _incentive(u, i, y, n)
    y[j] = 1.0
    d10 = _incentive(u, i, y, n)
    y[l] = 1.0
    d11 = _incentive(u, i, y, n)
    y[j] = 0.0
    d01 = _incentive(u, i, y, n)
    return d00, d10 - d00, d01 - d00, d11 - d10 - d01 + d00


@njit(cache=True)
def _linear(u, i, j, x, n):
    """Coefficients of D_i = a + b x_j with every other player fixed at x."""
    y = x.copy()
    y[j] = 0.0
    a = _incentive(u, i, y, n)
    y[j] = 1.0
    return a, _incentive(u, i, y, n) - a


@njit(cache=True)
def _scale(u):
    s = 0.0
    for v in u.ravel():
        if abs(v) > s:
            s = abs(v)
    return 1.0 + s


@njit(cache=True)
def _accept(u, x, n, eqs, gains, count):
    """Verify candidate ``x`` and append it unless it is a duplicate."""
    for i in range(n):
        if x[i] < -_RANGE_TOL or x[i] > 1.0 + _RANGE_TOL or np.isnan(x[i]):
            return count
    y = np.minimum(np.maximum(x, 0.0), 1.0)
    g = deviation_gain(u, y, n)
    if g > VERIFY_TOL:
        return count
    for e in range(count):
        if np.max(np.abs(eqs[e, :n] - y)) <= 1e-6:
            return count
    if count < eqs.shape[0]:
        eqs[count, :n] = y
        gains[count] = g
        count += 1
    return count


@njit(cache=True)
def _newton3(u, x, eqs, gains, count):
    """Damped Newton on the three indifference conditions, 27 fixed starts."""
    starts = np.array([0.25, 0.5, 0.75])
    for s0 in starts:
        for s1 in starts:
            for s2 in starts:
                z = np.array([s0, s1, s2])
                ok = False
                for _ in range(60):
                    f = np.empty(3)
                    jac = np.zeros((3, 3))
                    for i in range(3):
                        j = (i + 1) % 3
                        l = (i + 2) % 3
                        a, b, c, d = _bilinear(u, i, j, l, z, 3)
                        f[i] = a + b * z[j] + c * z[l] + d * z[j] * z[l]
                        jac[i, j] = b + d * z[l]
                        jac[i, l] = c + d * z[j]
                    if np.max(np.abs(f)) < 1e-13 * _scale(u):
                        ok = True
                        break
                    if abs(np.linalg.det(jac)) < 1e-300:
                        break
                    step = np.linalg.solve(jac, f)
                    t = 1.0
                    for _k in range(30):
                        trial = z - t * step
                        if np.all(trial >= -0.5) and np.all(trial <= 1.5):
                            break
                        t *= 0.5
                    z = z - t * step
                if ok:
                    count = _accept(u, z, 3, eqs, gains, count)
    return count


@njit(cache=True)
def _solve_three_mixed(u, eqs, gains, count):
    """All three players mixed; returns (count, degenerate)."""
    tol = _INDIFF_TOL * _scale(u)
    x = np.full(3, 0.5)
    a0, b0, c0, d0 = _bilinear(u, 0, 1, 2, x, 3)  # D0(q, r)
    a1, b1, c1, d1 = _bilinear(u, 1, 0, 2, x, 3)  # D1(p, r)
    a2, b2, c2, d2 = _bilinear(u, 2, 0, 1, x, 3)  # D2(p, q)
    # q = Nq/Qq and p = Np/Qp, each linear in r
    nq0, nq1, qq0, qq1 = -a0, -c0, b0, d0
    np0, np1, qp0, qp1 = -a1, -c1, b1, d1
    if (abs(qq0) <= tol and abs(qq1) <= tol) or (abs(qp0) <= tol and abs(qp1) <= tol):
        return _newton3(u, x, eqs, gains, count), True
    # D2 * Qp * Qq as a quadratic in r
    c_0 = a2 * qp0 * qq0 + b2 * np0 * qq0 + c2 * nq0 * qp0 + d2 * np0 * nq0
    c_1 = (
        a2 * (qp0 * qq1 + qp1 * qq0)
        + b2 * (np0 * qq1 + np1 * qq0)
        + c2 * (nq0 * qp1 + nq1 * qp0)
        + d2 * (np0 * nq1 + np1 * nq0)
    )
    c_2 = a2 * qp1 * qq1 + b2 * np1 * qq1 + c2 * nq1 * qp1 + d2 * np1 * nq1
    ptol = tol * _scale(u) ** 2
    roots = np.empty(2)
    nroots = 0
    if abs(c_2) > ptol:
        disc = c_1 * c_1 - 4.0 * c_2 * c_0
        if disc >= 0.0:
            sq = np.sqrt(disc)
            # numerically stable pair of roots
            qv = -0.5 * (c_1 + (sq if c_1 >= 0.0 else -sq))
            roots[0] = qv / c_2
            nroots = 1
            if qv != 0.0:
                roots[1] = c_0 / qv
                nroots = 2
    elif abs(c_1) > ptol:
        roots[0] = -c_0 / c_1
        nroots = 1
    elif abs(c_0) <= ptol:
        return _newton3(u, x, eqs, gains, count), True
    degenerate = False
    for k in range(nroots):
        r = roots[k]
        if r < -_RANGE_TOL or r > 1.0 + _RANGE_TOL:
            continue
        qp = qp0 + qp1 * r
        qq = qq0 + qq1 * r
        if abs(qp) <= tol or abs(qq) <= tol:
            degenerate = True
            continue
        cand = np.array([(np0 + np1 * r) / qp, (nq0 + nq1 * r) / qq, r])
        count = _accept(u, cand, 3, eqs, gains, count)
    if degenerate:
        count = _newton3(u, x, eqs, gains, count)
    return count, degenerate


@njit(cache=True)
def solve_binary_game(u, n):
    """Enumerate equilibria of a two-action game.

    Returns ``(eqs, gains, count, flags)`` where ``eqs[:count, :n]`` holds the
    probabilities of action 1 and ``gains`` the verified deviation bounds.
    """
    eqs = np.zeros((MAX_EQUILIBRIA, n))
    gains = np.zeros(MAX_EQUILIBRIA)
    count = 0
    flags = 0
    tol = _INDIFF_TOL * _scale(u)
    ncodes = 3**n
    digits = np.zeros(n, dtype=np.int64)
    for level in range(n + 1):
        for code in range(ncodes):
            c = code
            mixed = 0
            for i in range(n - 1, -1, -1):
                digits[i] = c % 3
                c //= 3
                if digits[i] == 2:
                    mixed += 1
            if mixed != level:
                continue
            x = np.zeros(n)
            for i in range(n):
                x[i] = 1.0 if digits[i] == 1 else (0.5 if digits[i] == 2 else 0.0)
            if level == 0:
                count = _accept(u, x, n, eqs, gains, count)
            elif level == 1:
                i = 0
                for j in range(n):
                    if digits[j] == 2:
                        i = j
                if abs(_incentive(u, i, x, n)) > tol:
                    continue
                flags |= FLAG_DEGENERATE
                lo, hi = 0.0, 1.0
                for j in range(n):
                    if j == i:
                        continue
                    a, b = _linear(u, j, i, x, n)
                    # player j must weakly prefer its fixed action: s * (a + b x_i) >= 0
                    s = 1.0 if digits[j] == 1 else -1.0
                    a, b = s * a, s * b
                    if abs(b) <= tol:
                        if a < -tol:
                            lo, hi = 1.0, 0.0
                    elif b > 0:
                        lo = max(lo, -a / b)
                    else:
                        hi = min(hi, -a / b)
                if lo > hi:
                    continue
                for end in (lo, hi):
                    if 0.0 < end < 1.0:
                        x[i] = end
                        count = _accept(u, x, n, eqs, gains, count)
            elif level == 2:
                i = -1
                j = -1
                for k in range(n):
                    if digits[k] == 2:
                        if i < 0:
                            i = k
                        else:
                            j = k
                ai, bi = _linear(u, i, j, x, n)
                aj, bj = _linear(u, j, i, x, n)
                if abs(bi) <= tol or abs(bj) <= tol:
                    if (abs(bi) <= tol and abs(ai) <= tol) or (abs(bj) <= tol and abs(aj) <= tol):
                        flags |= FLAG_DEGENERATE
                    continue
                x[j] = -ai / bi
                x[i] = -aj / bj
                count = _accept(u, x, n, eqs, gains, count)
            else:
                count, degenerate = _solve_three_mixed(u, eqs, gains, count)
                if degenerate:
                    flags |= FLAG_DEGENERATE
    if count == 0:
        flags |= FLAG_FAILED
        eqs[0, :n] = 0.5
        gains[0] = deviation_gain(u, eqs[0, :n], n)
        count = 1
    return eqs, gains, count, flags


@njit(cache=True)
def select_equilibrium(u, n, player):
    """Equilibrium maximizing ``player``'s own payoff; ties keep enumeration order.

    Returns the probability that ``player`` plays action 1 and the solver flags.
    """
    eqs, gains, count, flags = solve_binary_game(u, n)
    best = -np.inf
    for e in range(count):
        v = profile_value(u, player, eqs[e, :n], n)
        if v > best:
            best = v
    for e in range(count):
        if profile_value(u, player, eqs[e, :n], n) >= best - 1e-9:
            return eqs[e, player], flags
    return eqs[0, player], flags


# -- Python surface ---------------------------------------------------------


@dataclass
class Equilibrium:
    profile: list[np.ndarray]
    violation: float


@dataclass
class EquilibriumList:
    equilibria: list[Equilibrium] = field(default_factory=list)
    degenerate: bool = False
    failed: bool = False

    def __len__(self):
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)

    def __getitem__(self, i):
        return self.equilibria[i]

    def profiles(self) -> list[list[np.ndarray]]:
        return [e.profile for e in self.equilibria]


def _solve(game: RepeatedGame) -> EquilibriumList:
    n = game.player_count
    u = np.ascontiguousarray(game.flat_payoffs(), dtype=np.float64)
    eqs, gains, count, flags = solve_binary_game(u, n)
    out = EquilibriumList(
        degenerate=bool(flags & FLAG_DEGENERATE), failed=bool(flags & FLAG_FAILED)
    )
    for e in range(count):
        profile = [np.array([1.0 - p, p]) for p in eqs[e, :n]]
        out.equilibria.append(Equilibrium(profile, float(gains[e])))
    return out


def find_nash_2x2(game: RepeatedGame) -> EquilibriumList:
    if game.action_counts != (2, 2):
        raise ValueError(f"find_nash_2x2 needs a 2x2 game, got {game.action_counts}")
    return _solve(game)


def find_nash_2x2x2(game: RepeatedGame) -> EquilibriumList:
    if game.action_counts != (2, 2, 2):
        raise ValueError(f"find_nash_2x2x2 needs a 2x2x2 game, got {game.action_counts}")
    return _solve(game)


def find_nash(game: RepeatedGame) -> EquilibriumList:
    if game.action_counts == (2, 2):
        return find_nash_2x2(game)
    if game.action_counts == (2, 2, 2):
        return find_nash_2x2x2(game)
    raise ValueError(f"no equilibrium solver for shape {game.action_counts}")


def equilibrium_violation(game: RepeatedGame, profile) -> float:
    """Largest pure-deviation gain, computed directly from the payoff tensor."""
    worst = 0.0
    for i, m in enumerate(game.action_counts):
        here = expected_payoff(game, profile, i)
        for a in range(m):
            dev = list(profile)
            dev[i] = np.eye(m)[a]
            worst = max(worst, expected_payoff(game, dev, i) - here)
    return worst
