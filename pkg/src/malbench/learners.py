"""The five learning algorithms.

Every learner keeps its state in a handful of small float arrays and does
its arithmetic in numba-compiled functions. The same functions drive the
per-object API (``select_action`` / ``observe``) and the compiled play loop
in :mod:`malbench.simulate`, so both paths produce identical plays.

Joint actions are flattened row-major (player 0 slowest). Each learner draws
exactly one uniform number per step from its own generator; the interval
``[0, explore)`` selects a uniformly random action and the rest of the unit
interval samples the learner's policy by inverse CDF.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .solvers.nash import FLAG_FAILED, select_equilibrium

JAL, CJAL, WOLFPHC, REGMAT, NASHQ = range(5)

AUX_SIZE = 8
# aux slots: counter/t, realized payoff sum, regmat current action,
# nashq cache valid, nashq cached p(action 1), nashq solver failures

NASHQ_CACHE_TOL = 1e-9


@dataclass(frozen=True)
class LearnerConfig:
    alpha: float = 0.1
    epsilon: float = 0.05
    regmat_delta: float = 0.1
    regmat_gamma: float = 0.2
    wolf_base: float = 1000.0
    # normalizer for regret switching; None means k, the number of outcomes
    regmat_mu: float | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.regmat_delta <= 1.0:
            raise ValueError(f"regmat_delta must lie in [0, 1], got {self.regmat_delta}")
        if not 0.0 < self.regmat_gamma < 1.0:
            raise ValueError(f"regmat_gamma must lie in (0, 1), got {self.regmat_gamma}")
        if self.wolf_base <= 0:
            raise ValueError(f"wolf_base must be positive, got {self.wolf_base}")
        if self.regmat_mu is not None and self.regmat_mu <= 0:
            raise ValueError(f"regmat_mu must be positive, got {self.regmat_mu}")

    @classmethod
    def from_mapping(cls, values: dict) -> "LearnerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise KeyError(f"unknown learner config key(s): {', '.join(sorted(unknown))}")
        return cls(**values)

    def wolf_win_rate(self, t: int) -> float:
        return 1.0 / (self.wolf_base + t)


# -- shared numeric core ----------------------------------------------------


@njit(cache=True)
def q_update(value, payoff, alpha):
    return (1.0 - alpha) * value + alpha * payoff


@njit(cache=True)
def _point_mass(m, a):
    out = np.zeros(m)
    out[a] = 1.0
    return out


@njit(cache=True)
def _mix_uniform(policy, explore):
    m = policy.shape[0]
    return (1.0 - explore) * policy + explore / m


@njit(cache=True)
def sample_action(policy, explore, u):
    """Draw an action with one uniform ``u``; returns ``(action, explored)``."""
    m = policy.shape[0]
    if u < explore:
        return min(int(u / explore * m), m - 1), True
    v = (u - explore) / (1.0 - explore)
    acc = 0.0
    last = 0
    for a in range(m):
        if policy[a] > 0.0:
            last = a
        acc += policy[a]
        if v < acc:
            return a, False
    return last, False


@njit(cache=True)
def _decode(idx, action_counts, player):
    """Own action of ``player`` in flat joint index ``idx``."""
    rem = idx
    for j in range(action_counts.shape[0] - 1, -1, -1):
        m = action_counts[j]
        if j == player:
            return rem % m
        rem //= m
    return 0


@njit(cache=True)
def _marginals(counts, action_counts):
    n = action_counts.shape[0]
    probs = np.zeros(counts.shape)
    for j in range(n):
        m = action_counts[j]
        total = 0.0
        for a in range(m):
            total += counts[j, a]
        for a in range(m):
            probs[j, a] = counts[j, a] / total if total > 0 else 1.0 / m
    return probs


@njit(cache=True)
def _jal_values(q, probs, action_counts, player):
    n = action_counts.shape[0]
    ev = np.zeros(action_counts[player])
    for idx in range(q.shape[0]):
        rem = idx
        w = 1.0
        own = 0
        for j in range(n - 1, -1, -1):
            m = action_counts[j]
            a = rem % m
            rem //= m
            if j == player:
                own = a
            else:
                w *= probs[j, a]
        ev[own] += w * q[idx]
    return ev


@njit(cache=True)
def _cjal_values(q, joint, action_counts, player):
    m = action_counts[player]
    rest = q.shape[0] // m
    played = np.zeros(m)
    weighted = np.zeros(m)
    plain = np.zeros(m)
    for idx in range(q.shape[0]):
        own = _decode(idx, action_counts, player)
        played[own] += joint[idx]
        weighted[own] += q[idx] * joint[idx]
        plain[own] += q[idx]
    ev = np.empty(m)
    for a in range(m):
        ev[a] = weighted[a] / played[a] if played[a] > 0 else plain[a] / rest
    return ev


@njit(cache=True)
def _phc_step(pi, q, delta):
    m = pi.shape[0]
    greedy = np.argmax(q)
    for a in range(m):
        if a == greedy:
            pi[a] = min(1.0, pi[a] + delta)
        else:
            pi[a] = max(0.0, pi[a] - delta / (m - 1))
    pi /= pi.sum()


@njit(cache=True)
def _wolf_winning(pi, avg, q):
    return np.dot(pi, q) >= np.dot(avg, q)


@njit(cache=True)
def _wolf_update(qa, pi, avg, aux, action, reward, alpha, wolf_base):
    qa[action] = q_update(qa[action], reward, alpha)
    aux[0] += 1.0
    t = aux[0]
    avg += (pi - avg) / t
    rate = 1.0 / (wolf_base + t)
    if not _wolf_winning(pi, avg, qa):
        rate *= 2.0
    _phc_step(pi, qa, rate)


@njit(cache=True)
def _hannan(cf, realized, t):
    if t <= 0:
        return np.zeros(cf.shape[0])
    return cf / t - realized / t


@njit(cache=True)
def _regret_switch(regrets, current, gamma, mu):
    """Switch to each other action with probability R+ / (gamma mu); stay otherwise."""
    m = regrets.shape[0]
    pol = np.zeros(m)
    total = 0.0
    for j in range(m):
        if j != current and regrets[j] > 0.0:
            pol[j] = regrets[j] / (gamma * mu)
            total += pol[j]
    if total > 1.0:
        pol /= total
        total = 1.0
    pol[current] = 1.0 - total
    return pol


# -- per-seat dispatch --------------------------------------------------------


@njit(cache=True)
def seat_policy(kind, player, action_counts, q, counts, joint, qa, pi, avg, cf, aux, est, snap, gamma, mu):
    """Exploration-free policy of one learner (the strategy recorded by metrics)."""
    m = action_counts[player]
    if kind == JAL:
        ev = _jal_values(q, _marginals(counts, action_counts), action_counts, player)
        return _point_mass(m, np.argmax(ev))
    if kind == CJAL:
        ev = _cjal_values(q, joint, action_counts, player)
        return _point_mass(m, np.argmax(ev))
    if kind == WOLFPHC:
        return pi[:m].copy()
    if kind == REGMAT:
        regrets = _hannan(cf[:m], aux[1], aux[0])
        return _regret_switch(regrets, int(aux[2]), gamma, mu)
    # NASHQ
    if aux[3] == 0.0 or np.max(np.abs(est - snap)) > NASHQ_CACHE_TOL:
        p1, flags = select_equilibrium(est, action_counts.shape[0], player)
        snap[:] = est
        aux[3] = 1.0
        aux[4] = p1
        if flags & FLAG_FAILED:
            aux[5] += 1.0
    out = np.empty(2)
    out[0] = 1.0 - aux[4]
    out[1] = aux[4]
    return out


@njit(cache=True)
def seat_observe(kind, player, action_counts, strides, actions, payoffs, cf_row, q, counts, joint, qa, pi, avg, cf, aux, est, alpha, wolf_base):
    n = action_counts.shape[0]
    idx = 0
    for j in range(n):
        idx += actions[j] * strides[j]
    own = actions[player]
    if kind == JAL or kind == CJAL:
        q[idx] = q_update(q[idx], payoffs[player], alpha)
        if kind == JAL:
            for j in range(n):
                if j != player:
                    counts[j, actions[j]] += 1.0
        else:
            joint[idx] += 1.0
    elif kind == WOLFPHC:
        m = action_counts[player]
        _wolf_update(qa[:m], pi[:m], avg[:m], aux, own, payoffs[player], alpha, wolf_base)
    elif kind == REGMAT:
        m = action_counts[player]
        for b in range(m):
            cf[b] += cf_row[b]
        aux[0] += 1.0
        aux[1] += payoffs[player]
    else:
        for j in range(n):
            est[j, idx] = q_update(est[j, idx], payoffs[j], alpha)


@njit(cache=True)
def seat_explore_rate(kind, epsilon, delta):
    return delta if kind == REGMAT else epsilon


# -- public operations ------------------------------------------------------


def epsilon_greedy_distribution(values: Sequence[float], epsilon: float) -> np.ndarray:
    """Greedy action (lowest index on ties) gets 1 - eps + eps/m, the rest eps/m."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("need at least one action")
    return _mix_uniform(_point_mass(values.size, int(np.argmax(values))), epsilon)


def jal_expected_values(q: np.ndarray, marginals: Sequence[Sequence[float] | None], player: int = 0) -> np.ndarray:
    """EV(a_i) = sum over opponent joint actions of Q(a) times the product of marginals.

    ``q`` has the shape of the action grid; ``marginals[j]`` is ignored for ``j == player``.
    """
    q = np.asarray(q, dtype=float)
    counts = np.asarray(q.shape, dtype=np.int64)
    probs = np.zeros((len(counts), counts.max()))
    for j, m in enumerate(counts):
        if j == player:
            continue
        p = np.asarray(marginals[j], dtype=float)
        probs[j, :m] = p
    return _jal_values(q.ravel(), probs, counts, player)


def cjal_expected_values(q: np.ndarray, joint_counts: np.ndarray, player: int = 0) -> np.ndarray:
    """EV(a_i) = sum Q(a_i, a_-i) count(a_i, a_-i) / count(a_i), uniform if never played."""
    q = np.asarray(q, dtype=float)
    counts = np.asarray(q.shape, dtype=np.int64)
    joint = np.asarray(joint_counts, dtype=float)
    if joint.shape != q.shape:
        raise ValueError("joint counts and Q table must have the same shape")
    return _cjal_values(q.ravel(), joint.ravel(), counts, player)


def phc_step(policy: Sequence[float], q: Sequence[float], delta: float) -> np.ndarray:
    """One policy hill-climbing step of size ``delta`` toward the greedy action."""
    pi = np.array(policy, dtype=float)
    _phc_step(pi, np.asarray(q, dtype=float), delta)
    return pi


def wolf_is_winning(policy, average, q) -> bool:
    return bool(_wolf_winning(np.asarray(policy, float), np.asarray(average, float), np.asarray(q, float)))


def wolf_phc_update(policy, average, counter: int, q, config: LearnerConfig | None = None):
    """Average-policy update, win/lose rate choice and PHC step.

    ``q`` is the already-updated action-value vector; ``counter`` the number
    of completed plays before this one. Returns ``(policy, average, counter)``.
    """
    config = config or LearnerConfig()
    pi = np.array(policy, dtype=float)
    avg = np.array(average, dtype=float)
    q = np.asarray(q, dtype=float)
    counter += 1
    avg += (pi - avg) / counter
    rate = config.wolf_win_rate(counter)
    if not _wolf_winning(pi, avg, q):
        rate *= 2.0
    _phc_step(pi, q, rate)
    return pi, avg, counter


def hannan_regrets(counterfactual_sums, realized_sum: float, t: int) -> np.ndarray:
    """R_t(a) = (1/t) sum_tau u(a, a_-i^tau) - (1/t) sum_tau u(a^tau); zeros at t = 0."""
    return _hannan(np.asarray(counterfactual_sums, dtype=float), float(realized_sum), float(t))


def regmat_play_distribution(regrets, current_action: int, delta: float, gamma: float, mu: float) -> np.ndarray:
    """Regret-switching distribution from ``current_action`` mixed with delta-uniform exploration."""
    if delta < 0 or gamma <= 0:
        raise ValueError("delta must be >= 0 and gamma > 0")
    regrets = np.asarray(regrets, dtype=float)
    return _mix_uniform(_regret_switch(regrets, int(current_action), gamma, float(mu)), delta)


def nashq_strategy(estimates: np.ndarray, player: int) -> np.ndarray:
    """Own component of the selected equilibrium of the estimate game.

    ``estimates`` has shape ``(n, 2**n)`` (flat) or ``(n, 2, ..., 2)``.
    """
    est = np.asarray(estimates, dtype=float)
    n = est.shape[0]
    est = np.ascontiguousarray(est.reshape(n, -1))
    if est.shape[1] != 2**n or n not in (2, 3):
        raise ValueError("NashQ supports two-action games with two or three players")
    p1, _ = select_equilibrium(est, n, player)
    return np.array([1.0 - p1, p1])


# -- agent objects ----------------------------------------------------------


@dataclass
class Observation:
    """What the environment reveals after a step; learners read what they are entitled to.

    ``counterfactual[b]`` is the learner's own payoff had it played ``b``
    against the others' realized actions.
    """

    own_action: int
    payoff: float
    joint_action: tuple[int, ...] | None = None
    payoffs: np.ndarray | None = None
    counterfactual: np.ndarray | None = None


OBSERVE_OWN = "own"
OBSERVE_JOINT = "joint"
OBSERVE_COUNTERFACTUAL = "counterfactual"
OBSERVE_FULL = "full"


def strides_for(action_counts: Sequence[int]) -> np.ndarray:
    counts = np.asarray(action_counts, dtype=np.int64)
    strides = np.ones(len(counts), dtype=np.int64)
    for j in range(len(counts) - 2, -1, -1):
        strides[j] = strides[j + 1] * counts[j + 1]
    return strides


class Learner:
    """Interface every agent in a play implements."""

    name = "learner"
    observes = OBSERVE_OWN

    def __init__(self, player: int, action_counts: Sequence[int], config: LearnerConfig | None = None, seed=None):
        self.player = int(player)
        self.action_counts = tuple(int(m) for m in action_counts)
        if not 0 <= self.player < len(self.action_counts):
            raise ValueError(f"player {player} out of range for {len(self.action_counts)} players")
        self.config = config or LearnerConfig()
        self.rng = np.random.default_rng(seed)

    @property
    def action_count(self) -> int:
        return self.action_counts[self.player]

    @property
    def explore_rate(self) -> float:
        return 0.0

    def current_strategy(self) -> np.ndarray:
        raise NotImplementedError

    def selection_distribution(self) -> np.ndarray:
        return _mix_uniform(self.current_strategy(), self.explore_rate)

    def select_action(self) -> int:
        action, _ = sample_action(self.current_strategy(), self.explore_rate, self.rng.random())
        return int(action)

    def observe(self, obs: Observation) -> None:
        pass


class KernelLearner(Learner):
    kind = -1

    def __init__(self, player, action_counts, config=None, seed=None):
        super().__init__(player, action_counts, config, seed)
        counts = self.action_counts
        n, k, mmax = len(counts), int(np.prod(counts)), max(counts)
        self._counts = np.asarray(counts, dtype=np.int64)
        self._strides = strides_for(counts)
        self.q = np.zeros(k)
        self.marginal_counts = np.zeros((n, mmax))
        self.joint_counts = np.zeros(k)
        self.action_values = np.zeros(mmax)
        self.policy = np.zeros(mmax)
        self.policy[: self.action_count] = 1.0 / self.action_count
        self.average_policy = self.policy.copy()
        self.counterfactual_sums = np.zeros(mmax)
        self.aux = np.zeros(AUX_SIZE)
        self.estimates = np.zeros((n, k))
        self._snapshot = np.zeros((n, k))
        self._cached: np.ndarray | None = None
        self.mu = float(self.config.regmat_mu or k)

    @property
    def explore_rate(self) -> float:
        return seat_explore_rate(self.kind, self.config.epsilon, self.config.regmat_delta)

    def current_strategy(self) -> np.ndarray:
        if self._cached is None:
            self._cached = seat_policy(
                self.kind, self.player, self._counts, self.q, self.marginal_counts, self.joint_counts,
                self.action_values, self.policy, self.average_policy, self.counterfactual_sums,
                self.aux, self.estimates, self._snapshot, self.config.regmat_gamma, self.mu,
            )
        return self._cached.copy()

    def select_action(self) -> int:
        action, explored = sample_action(self.current_strategy(), self.explore_rate, self.rng.random())
        if self.kind == REGMAT and not explored:
            self.aux[2] = action
            self._cached = None
        return int(action)

    def observe(self, obs: Observation) -> None:
        n = len(self.action_counts)
        actions = np.zeros(n, dtype=np.int64)
        payoffs = np.zeros(n)
        cf_row = np.zeros(self.action_count)
        actions[self.player] = obs.own_action
        payoffs[self.player] = obs.payoff
        if self.observes != OBSERVE_OWN:
            actions[:] = obs.joint_action
        if self.observes == OBSERVE_FULL:
            payoffs[:] = obs.payoffs
        if self.observes == OBSERVE_COUNTERFACTUAL:
            cf_row[:] = obs.counterfactual
        seat_observe(
            self.kind, self.player, self._counts, self._strides, actions, payoffs, cf_row,
            self.q, self.marginal_counts, self.joint_counts, self.action_values, self.policy,
            self.average_policy, self.counterfactual_sums, self.aux, self.estimates,
            self.config.alpha, self.config.wolf_base,
        )
        self._cached = None


class JALLearner(KernelLearner):
    """Joint-action learner with marginal opponent models."""

    name = "jal"
    kind = JAL
    observes = OBSERVE_JOINT

    def expected_values(self) -> np.ndarray:
        probs = _marginals(self.marginal_counts, self._counts)
        return _jal_values(self.q, probs, self._counts, self.player)


class CJALLearner(KernelLearner):
    """Joint-action learner whose opponent model is conditioned on its own action."""

    name = "cjal"
    kind = CJAL
    observes = OBSERVE_JOINT

    def expected_values(self) -> np.ndarray:
        return _cjal_values(self.q, self.joint_counts, self._counts, self.player)


class WoLFPHCLearner(KernelLearner):
    name = "wolfphc"
    kind = WOLFPHC
    observes = OBSERVE_OWN


class RegMatLearner(KernelLearner):
    name = "regmat"
    kind = REGMAT
    observes = OBSERVE_COUNTERFACTUAL

    def regrets(self) -> np.ndarray:
        m = self.action_count
        return _hannan(self.counterfactual_sums[:m], self.aux[1], self.aux[0])

    @property
    def current_action(self) -> int:
        return int(self.aux[2])


class NashQLearner(KernelLearner):
    name = "nashq"
    kind = NASHQ
    observes = OBSERVE_FULL

    def __init__(self, player, action_counts, config=None, seed=None):
        counts = tuple(action_counts)
        if len(counts) not in (2, 3) or any(m != 2 for m in counts):
            raise ValueError("NashQ supports two-action games with two or three players")
        super().__init__(player, action_counts, config, seed)

    @property
    def solver_failures(self) -> int:
        return int(self.aux[5])


LEARNERS: dict[str, Callable[..., Learner]] = {
    "jal": JALLearner,
    "cjal": CJALLearner,
    "wolfphc": WoLFPHCLearner,
    "regmat": RegMatLearner,
    "nashq": NashQLearner,
}

DISPLAY_NAMES = {"jal": "JAL", "cjal": "CJAL", "wolfphc": "WOLF-PHC", "regmat": "RegMat", "nashq": "NashQ"}
ROSTER = tuple(LEARNERS)


def make_learner(name: str, player: int, action_counts, config: LearnerConfig | None = None, seed=None) -> Learner:
    try:
        factory = LEARNERS[name]
    except KeyError:
        raise KeyError(f"unknown learner {name!r}; known: {', '.join(LEARNERS)}") from None
    return factory(player, action_counts, config, seed)


@dataclass
class FixedStrategyLearner(Learner):
    """Stationary agent playing a fixed distribution; used as a test stub."""

    player: int = 0
    action_counts: tuple[int, ...] = (2, 2)
    strategy: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    seed: int | None = None
    name: str = "fixed"

    def __post_init__(self):
        Learner.__init__(self, self.player, self.action_counts, None, self.seed)
        self.strategy = np.asarray(self.strategy, dtype=float)

    def current_strategy(self) -> np.ndarray:
        return self.strategy.copy()
