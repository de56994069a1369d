"""Compiled inner loops.

Every sequential sampler in the package spends its time here. Random
numbers are never drawn inside these functions: callers pass pre-drawn
uniforms from their numpy Generator, so streams stay reproducible and
independent of numba's own RNG.
"""

import math

import numpy as np
from numba import njit

LOG_HALF = math.log(0.5)


@njit(cache=True)
def bb_conditional(e_rest, e_star, alpha, beta):
    """Pr(focal edge present | e_rest other edges) under beta-Bernoulli."""
    return (e_rest + alpha) / (e_star - 1 + alpha + beta)


@njit(cache=True)
def dc_potential(m, a, n, alpha, beta, gamma):
    """Graph-dependent part of the Dirichlet-categorical log-pmf."""
    return (
        math.lgamma(m + alpha)
        + math.lgamma(a + beta)
        + math.lgamma(n + gamma)
        + a * LOG_HALF
    )


@njit(cache=True)
def dc_conditional(m, a, n, y_ji, alpha, beta, gamma):
    """Pr(y_ij = 1 | rest) from the log-pmf ratio; (m, a, n) exclude dyad {i,j}."""
    if y_ji:
        up = dc_potential(m + 1, a, n, alpha, beta, gamma)
        down = dc_potential(m, a + 1, n, alpha, beta, gamma)
    else:
        up = dc_potential(m, a + 1, n, alpha, beta, gamma)
        down = dc_potential(m, a, n + 1, alpha, beta, gamma)
    return 1.0 / (1.0 + math.exp(down - up))


@njit(cache=True)
def contagion_rounds(x, e, pairs, u, e_star, alpha, beta):
    """Apply one contagion update per entry of ``pairs``; returns the new edge count."""
    for t in range(pairs.shape[0]):
        k = pairs[t]
        e_rest = e - x[k]
        new = 1 if u[t] < bb_conditional(e_rest, e_star, alpha, beta) else 0
        x[k] = new
        e = e_rest + new
    return e


@njit(cache=True)
def _census(y):
    n = y.shape[0]
    m = 0
    a = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = y[i, j] + y[j, i]
            if s == 2:
                m += 1
            elif s == 1:
                a += 1
    return m, a, n * (n - 1) // 2 - m - a


@njit(cache=True)
def dc_gibbs_sweeps(y, u, alpha, beta, gamma, out):
    """Systematic-scan single-edge Gibbs sweeps for the Dirichlet-categorical pmf.

    ``u`` has one row of n(n-1) uniforms per sweep; the state after sweep s
    is written to ``out[s]``.
    """
    n = y.shape[0]
    m, a, nn = _census(y)
    for s in range(u.shape[0]):
        k = 0
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                st = y[i, j] + y[j, i]
                if st == 2:
                    m -= 1
                elif st == 1:
                    a -= 1
                else:
                    nn -= 1
                p = dc_conditional(m, a, nn, y[j, i], alpha, beta, gamma)
                y[i, j] = 1 if u[s, k] < p else 0
                k += 1
                st = y[i, j] + y[j, i]
                if st == 2:
                    m += 1
                elif st == 1:
                    a += 1
                else:
                    nn += 1
        out[s] = y


@njit(cache=True)
def _draw_binary(logw1, logw0, u):
    if logw1 == -np.inf and logw0 == -np.inf:
        return -1
    if logw1 == -np.inf:
        return 0
    if logw0 == -np.inf:
        return 1
    p = 1.0 / (1.0 + math.exp(logw0 - logw1))
    return 1 if u < p else 0


@njit(cache=True, nogil=True)
def posterior_bb_sweeps(y, ll1, ll0, u, alpha, beta, out):
    """Single-edge Gibbs for a beta-Bernoulli prior with per-cell log-likelihoods.

    ``ll1``/``ll0`` hold the observation log-likelihood of each cell when
    the true edge is present/absent. Returns -1 if some cell is impossible
    in both states, else 0.
    """
    n = y.shape[0]
    e_star = n * (n - 1)
    e = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                e += y[i, j]
    for s in range(u.shape[0]):
        k = 0
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                e_rest = e - y[i, j]
                p = bb_conditional(e_rest, e_star, alpha, beta)
                v = _draw_binary(math.log(p) + ll1[i, j], math.log1p(-p) + ll0[i, j], u[s, k])
                if v < 0:
                    return -1
                y[i, j] = v
                e = e_rest + v
                k += 1
        out[s] = y
    return 0


@njit(cache=True, nogil=True)
def posterior_dc_sweeps(y, ll1, ll0, u, alpha, beta, gamma, out):
    """Dyad-block Gibbs for a Dirichlet-categorical prior.

    Each dyad {i<j} is redrawn jointly over (mutual, i->j only, j->i only,
    null) with weights proportional to the prior full-conditional mass of
    that state times the observation likelihood of both cells.
    """
    n = y.shape[0]
    m, a, nn = _census(y)
    logw = np.empty(4)
    for s in range(u.shape[0]):
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                st = y[i, j] + y[j, i]
                if st == 2:
                    m -= 1
                elif st == 1:
                    a -= 1
                else:
                    nn -= 1
                base = dc_potential(m, a, nn, alpha, beta, gamma)
                lm = dc_potential(m + 1, a, nn, alpha, beta, gamma) - base
                la = dc_potential(m, a + 1, nn, alpha, beta, gamma) - base
                ln = dc_potential(m, a, nn + 1, alpha, beta, gamma) - base
                logw[0] = lm + ll1[i, j] + ll1[j, i]
                logw[1] = la + ll1[i, j] + ll0[j, i]
                logw[2] = la + ll0[i, j] + ll1[j, i]
                logw[3] = ln + ll0[i, j] + ll0[j, i]
                top = logw.max()
                if top == -np.inf:
                    return -1
                total = 0.0
                for q in range(4):
                    logw[q] = math.exp(logw[q] - top)
                    total += logw[q]
                target = u[s, k] * total
                state = 3
                while logw[state] == 0.0:
                    state -= 1
                cum = 0.0
                for q in range(4):
                    cum += logw[q]
                    if target < cum:
                        state = q
                        break
                if state == 0:
                    y[i, j] = 1
                    y[j, i] = 1
                    m += 1
                elif state == 1:
                    y[i, j] = 1
                    y[j, i] = 0
                    a += 1
                elif state == 2:
                    y[i, j] = 0
                    y[j, i] = 1
                    a += 1
                else:
                    y[i, j] = 0
                    y[j, i] = 0
                    nn += 1
                k += 1
        out[s] = y
    return 0
