"""Numba kernels for the hot Monte Carlo loops.

Every parallel unit (path, replicate, orbit) owns a splitmix64 stream seeded
from a key array computed up front, so results are identical for any worker
count.  Aggregation order is by unit index throughout.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
U64_M1 = np.uint64(0xBF58476D1CE4E5B9)
U64_M2 = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S12 = np.uint64(12)
INV_2_52 = 1.0 / 4503599627370496.0


@njit(inline="always")
def _next_u01(state):
    # splitmix64 step; output uniform on the open interval (0, 1)
    state = state + U64_GAMMA
    z = state
    z = (z ^ (z >> S30)) * U64_M1
    z = (z ^ (z >> S27)) * U64_M2
    z = z ^ (z >> S31)
    return state, ((z >> S12) + np.float64(0.5)) * INV_2_52


@njit(inline="always")
def _kanter_draw(state, beta, c1, c2, c3):
    # exact positive stable draw, Laplace transform exp(-theta**beta)
    state, u = _next_u01(state)
    state, e = _next_u01(state)
    th = np.pi * u
    w = -np.log(e)
    a = np.sin(beta * th) ** c1 * np.sin((1.0 - beta) * th) / np.sin(th) ** c2
    return state, (a / w) ** c3


@njit(inline="always")
def _table_draw(state, body, tail, tail_split, inv_beta):
    # tabulated quantile draw; tail cells use the transformed tail table
    state, p = _next_u01(state)
    if p > 1.0 - tail_split:
        v = (1.0 - p) / tail_split
        fj = v * (tail.shape[0] - 1)
        j = int(fj)
        fr = fj - j
        g = tail[j] * (1.0 - fr) + tail[j + 1] * fr
        return state, g * v ** (-inv_beta)
    fi = p * (body.shape[0] - 1)
    i = int(fi)
    fr = fi - i
    return state, body[i] * (1.0 - fr) + body[i + 1] * fr


@njit(cache=True, parallel=True)
def ml_first_passage(beta, levels, u_step, seeds):
    """Grid first-passage of the subordinator across ascending `levels`.

    Returns (counts, overshoots): counts[i, j] is min{k : S(k u_step) >= levels[j]}
    for sample i, continuing one walk across all levels; overshoots[i, j] is
    S(count * u_step) - levels[j].  Exact Kanter increments.
    """
    n = seeds.shape[0]
    m = levels.shape[0]
    counts = np.zeros((n, m), dtype=np.int64)
    over = np.zeros((n, m))
    c1 = beta / (1.0 - beta)
    c2 = 1.0 / (1.0 - beta)
    c3 = (1.0 - beta) / beta
    scale = u_step ** (1.0 / beta)
    for i in prange(n):
        state = seeds[i]
        s = 0.0
        k = 0
        for j in range(m):
            lev = levels[j]
            if lev <= 0.0:
                counts[i, j] = 0
                over[i, j] = s  # only meaningful for positive levels
                continue
            while s < lev:
                state, xi = _kanter_draw(state, beta, c1, c2, c3)
                s += scale * xi
                k += 1
            counts[i, j] = k
            over[i, j] = s - lev
    return counts, over


@njit(cache=True, parallel=True)
def lepage_batch(alpha, beta, t_eval, T, n_terms, u_step, body, tail, tail_split, seeds, symmetric):
    """Truncated LePage sums w_i * M_i((t - x_i)+) accumulated per path.

    The (C_alpha * nu([0,T]))**(1/alpha) prefactor is applied by the caller.
    t_eval must be ascending; each series term runs one subordinator walk
    across all evaluation times (tabulated increments).
    """
    n_paths = seeds.shape[0]
    m = t_eval.shape[0]
    out = np.zeros((n_paths, m))
    inv_alpha = 1.0 / alpha
    mark_pow = 1.0 / (1.0 - beta)
    inv_beta = 1.0 / beta
    scale = u_step ** inv_beta
    for p in prange(n_paths):
        state = seeds[p]
        gam = 0.0
        acc = np.zeros(m)
        for _ in range(n_terms):
            state, ua = _next_u01(state)
            gam += -np.log(ua)
            w = gam ** (-inv_alpha)
            state, um = _next_u01(state)
            x = T * um**mark_pow
            if symmetric:
                state, us = _next_u01(state)
                if us < 0.5:
                    w = -w
            s = 0.0
            k = 0
            for j in range(m):
                lev = t_eval[j] - x
                if lev <= 0.0:
                    continue
                while s < lev:
                    state, xi = _table_draw(state, body, tail, tail_split, inv_beta)
                    s += scale * xi
                    k += 1
                acc[j] += w * (u_step * k)
        for j in range(m):
            out[p, j] = acc[j]
    return out


@njit(inline="always")
def _draw_return_time(state, qcdf):
    # first-entrance time from state 0; qcdf[k] = P(phi <= k), k = 0..cap.
    # beyond-cap draws return cap + 1 (callers guarantee cap >= horizon).
    state, u = _next_u01(state)
    if u > qcdf[qcdf.shape[0] - 1]:
        return state, qcdf.shape[0]
    return state, np.searchsorted(qcdf, u)


@njit(inline="always")
def _dn_visit_counts(state, qcdf, startcdf, horizon, cuts, cnt):
    """Visits to state 0 (times 1..cuts[j]) for one chain path given D_horizon.

    startcdf is the unnormalised cumulative of [q-mass of {phi<=horizon} at
    i=0, pi_1, ..., pi_horizon].  Returns the updated stream state.
    """
    ncut = cuts.shape[0]
    for j in range(ncut):
        cnt[j] = 0
    state, u0 = _next_u01(state)
    idx = np.searchsorted(startcdf, u0 * startcdf[startcdf.shape[0] - 1])
    if idx == 0:
        state, uq = _next_u01(state)
        v = np.searchsorted(qcdf, uq * qcdf[horizon])  # conditioned on phi <= horizon
    else:
        v = idx  # countdown from start state idx hits 0 at time idx
    while v <= horizon:
        for j in range(ncut):
            if v <= cuts[j]:
                cnt[j] += 1
        state, phi = _draw_return_time(state, qcdf)
        v += phi
    return state


@njit(cache=True, parallel=True)
def chain_partial_sums(qcdf, startcdf, horizon, cuts, n_points, seeds, alpha, symmetric):
    """Partial sums sum_{k<=cuts[j]} X_k for the compound-Poisson process.

    n_points[r] Poisson points per replicate; each point carries a Pareto
    mark and an independent chain path sampled on D_horizon.
    """
    reps = seeds.shape[0]
    ncut = cuts.shape[0]
    out = np.zeros((reps, ncut))
    for r in prange(reps):
        state = seeds[r]
        cnt = np.zeros(ncut, dtype=np.int64)
        for _ in range(n_points[r]):
            state, um = _next_u01(state)
            mag = um ** (-1.0 / alpha)
            if symmetric:
                state, us = _next_u01(state)
                if us < 0.5:
                    mag = -mag
            state = _dn_visit_counts(state, qcdf, startcdf, horizon, cuts, cnt)
            for j in range(ncut):
                out[r, j] += mag * cnt[j]
    return out


@njit(cache=True, parallel=True)
def chain_occupation_counts(qcdf, horizon, cuts, seeds):
    """Visits to 0 by time cuts[j], starting at state 0 (law P_0)."""
    reps = seeds.shape[0]
    ncut = cuts.shape[0]
    out = np.zeros((reps, ncut), dtype=np.int64)
    for r in prange(reps):
        state = seeds[r]
        v = 0
        while True:
            state, phi = _draw_return_time(state, qcdf)
            v += phi
            if v > horizon:
                break
            for j in range(ncut):
                if v <= cuts[j]:
                    out[r, j] += 1
    return out


@njit(cache=True, parallel=True)
def chain_dn_occupation_counts(qcdf, startcdf, horizon, cuts, seeds):
    """Visit counts under the normalised restriction of mu to {phi <= horizon}."""
    reps = seeds.shape[0]
    ncut = cuts.shape[0]
    out = np.zeros((reps, ncut), dtype=np.int64)
    for r in prange(reps):
        state = seeds[r]
        cnt = np.zeros(ncut, dtype=np.int64)
        state = _dn_visit_counts(state, qcdf, startcdf, horizon, cuts, cnt)
        for j in range(ncut):
            out[r, j] = cnt[j]
    return out


@njit(inline="always")
def _boole_apply(x):
    if x < 0.5:
        return x * (1.0 - x) / (1.0 - x - x * x)
    z = 1.0 - x
    return 1.0 - z * (1.0 - z) / (1.0 - z - z * z)


@njit(inline="always")
def _boole_x0(state, eps, f_eps):
    # inverse CDF of mu restricted to A_eps; F(x) = 1/(1-x) - 1/x, F(1/2) = 0
    state, u = _next_u01(state)
    mirror = u >= 0.5
    uu = 2.0 * u if u < 0.5 else 2.0 * (u - 0.5)
    y = f_eps * (1.0 - uu)  # from F(eps) < 0 up to 0
    if y < -1e-7:
        x = ((y - 2.0) + np.sqrt(y * y + 4.0)) / (2.0 * y)
    else:
        x = 0.5 + y / 8.0
    if mirror:
        x = 1.0 - x
    return state, x


@njit(cache=True, parallel=True)
def boole_occupation_counts(eps, f_eps, cuts, seeds, edge_tol):
    """Occupation of A_eps along Boole orbits started from normalised mu|A_eps.

    Orbits that come within edge_tol of a branch endpoint are discarded and
    restarted with a fresh start point; restarts are counted per orbit slot.
    """
    reps = seeds.shape[0]
    ncut = cuts.shape[0]
    horizon = cuts[ncut - 1]
    out = np.zeros((reps, ncut), dtype=np.int64)
    restarts = np.zeros(reps, dtype=np.int64)
    for r in prange(reps):
        state = seeds[r]
        done = False
        while not done:
            state, x = _boole_x0(state, eps, f_eps)
            for j in range(ncut):
                out[r, j] = 0
            bad = False
            step = 0
            while step < horizon:
                x = _boole_apply(x)
                step += 1
                if x < edge_tol or x > 1.0 - edge_tol or np.abs(x - 0.5) < edge_tol:
                    bad = True
                    break
                if x > eps and x < 1.0 - eps:
                    for j in range(ncut):
                        if step <= cuts[j]:
                            out[r, j] += 1
            if bad:
                restarts[r] += 1
            else:
                done = True
    return out, restarts


@njit(cache=True)
def boole_ladder(eps, n):
    """Preimage ladder under the left branch: u_0 = eps, T(u_k) = u_{k-1}.

    Plain bisection on (0, u_{k-1}); the branch is strictly increasing and
    T(x) > x there, so the bracket is valid.  54 iterations give absolute
    error below 1e-15 for eps <= 0.5.
    """
    out = np.empty(n + 1)
    out[0] = eps
    prev = eps
    for k in range(1, n + 1):
        lo = 0.0
        hi = prev
        for _ in range(54):
            mid = 0.5 * (lo + hi)
            if mid * (1.0 - mid) / (1.0 - mid - mid * mid) < prev:
                lo = mid
            else:
                hi = mid
        prev = 0.5 * (lo + hi)
        out[k] = prev
    return out
