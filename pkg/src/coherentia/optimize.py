"""Derivative-free minimization of the trace distance to the free-state set.

The inner objective (trace norm of rho minus a parametrized free state) is
evaluated millions of times inside the outer duality search, so both the
objective and the Nelder-Mead loop are numba-compiled.  Parameters are kept
feasible by construction: q through a sigmoid, the simplex through a softmax,
and the complement block through a normalized Gram factor.

All routines work in block coordinates, i.e. the incomplete basis is the
first n computational vectors and the canonical complement basis the rest.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def free_state_params_decode(x, n, m):
    """Unconstrained reals -> (q, p, complement block B)."""
    q = 1.0 / (1.0 + np.exp(-x[0]))
    logits = x[1 : 1 + n]
    mx = logits.max()
    ex = np.exp(logits - mx)
    p = ex / ex.sum()
    g = np.empty((m, m), dtype=np.complex128)
    base = 1 + n
    for i in range(m):
        for j in range(m):
            k = base + 2 * (i * m + j)
            g[i, j] = complex(x[k], x[k + 1])
    b = g @ g.conj().T
    tr = 0.0
    for i in range(m):
        tr += b[i, i].real
    if tr < 1e-300:
        b = np.eye(m, dtype=np.complex128) / m
    else:
        b = b / tr
    return q, p, b


@njit(cache=True)
def _trace_dist_objective(rho_blk, n, x):
    """Trace norm of rho - free_state(x), in block coordinates."""
    d = rho_blk.shape[0]
    m = d - n
    q, p, b = free_state_params_decode(x, n, m)
    delta = rho_blk.copy()
    for i in range(n):
        delta[i, i] -= q * p[i]
    for a in range(m):
        for c in range(m):
            delta[n + a, n + c] -= (1.0 - q) * b[a, c]
    vals = np.linalg.eigvalsh(delta)
    return np.abs(vals).sum()


@njit(cache=True)
def _nelder_mead(rho_blk, n, x0, step, maxiter, fatol):
    """Standard Nelder-Mead on the trace-distance objective.

    Stops when the simplex value spread falls below fatol or after maxiter
    iterations.  Returns (best value, best point, iterations used).
    """
    dim = x0.size
    alpha, gamma, beta, sigma = 1.0, 2.0, 0.5, 0.5
    sim = np.empty((dim + 1, dim))
    fvals = np.empty(dim + 1)
    sim[0] = x0
    fvals[0] = _trace_dist_objective(rho_blk, n, x0)
    for i in range(dim):
        sim[i + 1] = x0
        sim[i + 1, i] += step
        fvals[i + 1] = _trace_dist_objective(rho_blk, n, sim[i + 1])
    it = 0
    while it < maxiter:
        it += 1
        order = np.argsort(fvals)
        sim = sim[order]
        fvals = fvals[order]
        if fvals[dim] - fvals[0] < fatol:
            break
        centroid = np.zeros(dim)
        for i in range(dim):
            centroid += sim[i]
        centroid /= dim
        xr = centroid + alpha * (centroid - sim[dim])
        fr = _trace_dist_objective(rho_blk, n, xr)
        if fr < fvals[0]:
            xe = centroid + gamma * (centroid - sim[dim])
            fe = _trace_dist_objective(rho_blk, n, xe)
            if fe < fr:
                sim[dim] = xe
                fvals[dim] = fe
            else:
                sim[dim] = xr
                fvals[dim] = fr
        elif fr < fvals[dim - 1]:
            sim[dim] = xr
            fvals[dim] = fr
        else:
            if fr < fvals[dim]:
                xc = centroid + beta * (xr - centroid)
            else:
                xc = centroid + beta * (sim[dim] - centroid)
            fc = _trace_dist_objective(rho_blk, n, xc)
            if fc < min(fr, fvals[dim]):
                sim[dim] = xc
                fvals[dim] = fc
            else:
                for i in range(1, dim + 1):
                    sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                    fvals[i] = _trace_dist_objective(rho_blk, n, sim[i])
    best = np.argmin(fvals)
    return fvals[best], sim[best], it


@njit(cache=True)
def _default_start(n, m):
    """Deterministic start: q = 1/2, uniform p, maximally mixed block."""
    x0 = np.zeros(1 + n + 2 * m * m)
    for i in range(m):
        x0[1 + n + 2 * (i * m + i)] = 1.0
    return x0


@njit(cache=True)
def trace_dist_single(rho_blk, n, x0, step, maxiter, fatol, polish):
    """One Nelder-Mead run plus restart-from-best polish passes."""
    f, x, it = _nelder_mead(rho_blk, n, x0, step, maxiter, fatol)
    total = it
    for _ in range(polish):
        f2, x2, it2 = _nelder_mead(rho_blk, n, x, 0.1, maxiter, fatol)
        total += it2
        if f - f2 < fatol:
            if f2 < f:
                f, x = f2, x2
            break
        f, x = f2, x2
    return f, x, total


@njit(cache=True)
def trace_dist_multistart(rho_blk, n, restarts, seed, maxiter, fatol, polish):
    """Multi-start minimization of the trace distance to the free set.

    Restart 0 starts from the deterministic center point; the rest from
    seeded Gaussian draws.  Returns (best value, best point, per-restart
    values, total iterations).
    """
    d = rho_blk.shape[0]
    m = d - n
    dim = 1 + n + 2 * m * m
    per_restart = np.empty(restarts)
    best_f = np.inf
    best_x = np.zeros(dim)
    total_iters = 0
    for r in range(restarts):
        if r == 0:
            x0 = _default_start(n, m)
        else:
            np.random.seed((seed * 1000003 + r) % 2147483647)
            x0 = np.random.standard_normal(dim) * 1.2
        f, x, it = trace_dist_single(rho_blk, n, x0, 0.7, maxiter, fatol, polish)
        per_restart[r] = f
        total_iters += it
        if f < best_f:
            best_f = f
            best_x = x
    return best_f, best_x, per_restart, total_iters
