"""Compiled play loop for teams made only of the built-in learners."""

from __future__ import annotations

import numpy as np
from numba import njit

from .learners import AUX_SIZE, REGMAT, sample_action, seat_explore_rate, seat_observe, seat_policy


@njit(cache=True)
def simulate(kinds, u, action_counts, uniforms, alpha, epsilon, delta, gamma, wolf_base, mu):
    """Play ``uniforms.shape[1]`` steps of the game with flat payoffs ``u``.

    Returns ``(strategies, selections, actions, rewards, failures)``; the first
    two are ``(t_f, n, max m)`` arrays recorded before each step's selection.
    """
    n = kinds.shape[0]
    k = u.shape[1]
    mmax = 0
    for j in range(n):
        mmax = max(mmax, action_counts[j])
    steps = uniforms.shape[1]
    strides = np.ones(n, dtype=np.int64)
    for j in range(n - 2, -1, -1):
        strides[j] = strides[j + 1] * action_counts[j + 1]

    q = np.zeros((n, k))
    counts = np.zeros((n, n, mmax))
    joint = np.zeros((n, k))
    qa = np.zeros((n, mmax))
    pi = np.zeros((n, mmax))
    avg = np.zeros((n, mmax))
    cf = np.zeros((n, mmax))
    aux = np.zeros((n, AUX_SIZE))
    est = np.zeros((n, n, k))
    snap = np.zeros((n, n, k))
    for s in range(n):
        m = action_counts[s]
        pi[s, :m] = 1.0 / m
        avg[s, :m] = 1.0 / m

    strategies = np.zeros((steps, n, mmax))
    selections = np.zeros((steps, n, mmax))
    actions = np.zeros((steps, n), dtype=np.int64)
    rewards = np.zeros((steps, n))
    payoffs = np.zeros(n)

    for t in range(steps):
        idx = 0
        for s in range(n):
            m = action_counts[s]
            pol = seat_policy(kinds[s], s, action_counts, q[s], counts[s], joint[s], qa[s], pi[s],
                              avg[s], cf[s], aux[s], est[s], snap[s], gamma, mu)
            explore = seat_explore_rate(kinds[s], epsilon, delta)
            strategies[t, s, :m] = pol
            selections[t, s, :m] = (1.0 - explore) * pol + explore / m
            a, explored = sample_action(pol, explore, uniforms[s, t])
            if kinds[s] == REGMAT and not explored:
                aux[s, 2] = a
            actions[t, s] = a
            idx += a * strides[s]
        for s in range(n):
            payoffs[s] = u[s, idx]
            rewards[t, s] = payoffs[s]
        for s in range(n):
            m = action_counts[s]
            own = actions[t, s]
            cf_row = np.empty(m)
            for b in range(m):
                cf_row[b] = u[s, idx + (b - own) * strides[s]]
            seat_observe(kinds[s], s, action_counts, strides, actions[t], payoffs, cf_row, q[s],
                         counts[s], joint[s], qa[s], pi[s], avg[s], cf[s], aux[s], est[s],
                         alpha, wolf_base)
    failures = np.zeros(n)
    for s in range(n):
        failures[s] = aux[s, 5]
    return strategies, selections, actions, rewards, failures
