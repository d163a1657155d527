# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels.

Typed mirror of ``_search_py``: same arithmetic expressions, same move
ordering and tie-breaking, same repetition bookkeeping, so both kernels
produce bit-identical trajectories. Keep the two files in sync.
"""

from libc.math cimport floor, log10, fabs, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()

STOP_BOUND = 0
STOP_RELAXED_BOUND = 1
STOP_MAX_REP = 2
STOP_MAX_ITER = 3


cdef inline object _cost_key(double phi):
    if phi == 0.0 or not (phi == phi and fabs(phi) != INFINITY):
        return 0.0
    # box to a Python float so float.__round__ (correct decimal rounding)
    # is used, matching the reference kernel bit for bit
    cdef object boxed = phi
    return round(boxed, 11 - <int>floor(log10(fabs(phi))))


def rts_search(object R_in, object y_mf_in, double ynorm2, object x0_idx,
               object levels_in, object nbr_in, object rev_in,
               long P0, double beta, double alpha1, double alpha2,
               long max_rep, long min_iter, long max_iter):
    """Full reactive tabu search run; returns (g, phi_g, iters, reps, stop_reason)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] R = np.ascontiguousarray(R_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y_mf = np.ascontiguousarray(y_mf_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] levels = np.ascontiguousarray(levels_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] nbr = np.ascontiguousarray(nbr_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] rev = np.ascontiguousarray(rev_in, dtype=np.int64)

    cdef Py_ssize_t d = R.shape[0]
    cdef Py_ssize_t M = nbr.shape[0]
    cdef Py_ssize_t N = nbr.shape[1]
    cdef Py_ssize_t dN = d * N

    cdef cnp.ndarray[cnp.int64_t, ndim=1] x = np.asarray(x0_idx, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] g = x.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rdiag = np.ascontiguousarray(np.diag(R))
    xl = levels[x]
    cdef double phi_x = float(xl @ R @ xl - 2.0 * (xl @ y_mf))
    cdef double phi_g = phi_x
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = R @ xl - y_mf
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] T = np.zeros((d * M, N), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] C = np.empty(dN, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] examined = np.zeros(dN, dtype=np.uint8)

    cdef dict cost_hist = {}
    cost_hist[_cost_key(phi_x)] = 0

    cdef long P = P0
    cdef long iters = 0, lflag = 0, rep_count = 0, last_P_change = 0
    cdef double l_rep = 0.0
    cdef long stop_reason = STOP_MAX_ITER

    cdef Py_ssize_t u, v, i, flat, best, old_q, new_q, vrev
    cdef double e, bestc, new_phi, delta_level, ratio
    cdef long dec, t_entry, gap
    cdef object key, last

    while True:
        lflag = 0
        # neighborhood cost deltas: C(u,v) = 2 e f_u + e^2 R(u,u)
        for u in range(d):
            for v in range(N):
                e = levels[nbr[x[u], v]] - levels[x[u]]
                C[u * N + v] = 2.0 * e * f[u] + e * e * rdiag[u]

        # best permissible move: ascending C, ties toward smaller (u, v)
        for flat in range(dN):
            examined[flat] = 0
        while True:
            best = -1
            bestc = INFINITY
            for flat in range(dN):
                if not examined[flat] and C[flat] < bestc:
                    best = flat
                    bestc = C[flat]
            if best < 0:
                # every candidate tabu and non-aspirational: open the cheapest
                dec = 0
                for u in range(d):
                    for v in range(N):
                        t_entry = T[u * M + x[u], v]
                        if dec == 0 or t_entry < dec:
                            dec = t_entry
                for flat in range(d * M):
                    for v in range(N):
                        T[flat, v] = T[flat, v] - dec if T[flat, v] > dec else 0
                for flat in range(dN):
                    examined[flat] = 0
                continue
            u = best // N
            v = best % N
            if phi_x + C[best] < phi_g:
                break
            if T[u * M + x[u], v] == 0:
                break
            examined[best] = 1

        old_q = x[u]
        new_q = nbr[old_q, v]
        new_phi = phi_x + C[u * N + v]
        x[u] = new_q

        # reactive update: repetition stats, tabu period, tabu writes
        key = _cost_key(new_phi)
        last = cost_hist.get(key)
        if last is not None:
            gap = (iters + 1) - <long>last
            rep_count += 1
            l_rep += (gap - l_rep) / rep_count
            P += 1
            last_P_change = iters + 1
        cost_hist[key] = iters + 1
        if rep_count > 0 and (iters + 1) - last_P_change > beta * l_rep:
            P = P - 1 if P > 1 else 1
            last_P_change = iters + 1
        vrev = rev[new_q, old_q]
        if new_phi < phi_g:
            T[u * M + old_q, v] = 0
            if vrev >= 0:
                T[u * M + new_q, vrev] = 0
            for i in range(d):
                g[i] = x[i]
            phi_g = new_phi
        else:
            T[u * M + old_q, v] = P + 1
            if vrev >= 0:
                T[u * M + new_q, vrev] = P + 1
            lflag = 1

        # iteration end: tabu decay, rank-one f update
        for flat in range(d * M):
            for i in range(N):
                if T[flat, i] > 0:
                    T[flat, i] = T[flat, i] - 1
        delta_level = levels[new_q] - levels[old_q]
        for i in range(d):
            f[i] += delta_level * R[i, u]
        iters += 1
        phi_x = new_phi

        # stopping criterion
        if ynorm2 >= 1e-12:
            ratio = fabs(phi_g + ynorm2) / ynorm2
            if lflag and iters >= min_iter and ratio < alpha1:
                stop_reason = STOP_BOUND
                break
            if lflag and ratio < iters * alpha2:
                stop_reason = STOP_RELAXED_BOUND
                break
        if rep_count > max_rep:
            stop_reason = STOP_MAX_REP
            break
        if iters >= max_iter:
            stop_reason = STOP_MAX_ITER
            break

    return g, phi_g, iters, rep_count, stop_reason


def las_search(object R_in, object y_mf_in, object x0_idx, object levels_in,
               object nbr_in, max_steps=None):
    """Steepest-descent single-coordinate search; returns (x, phi, steps)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] R = np.ascontiguousarray(R_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y_mf = np.ascontiguousarray(y_mf_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] levels = np.ascontiguousarray(levels_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] nbr = np.ascontiguousarray(nbr_in, dtype=np.int64)

    cdef Py_ssize_t d = R.shape[0]
    cdef Py_ssize_t N = nbr.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] x = np.asarray(x0_idx, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rdiag = np.ascontiguousarray(np.diag(R))
    xl = levels[x]
    cdef double phi = float(xl @ R @ xl - 2.0 * (xl @ y_mf))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = R @ xl - y_mf

    cdef long cap
    if max_steps is None:
        cap = 10 * d * N + 100
    else:
        cap = max_steps

    cdef Py_ssize_t u, v, i, best_u, best_v, old_q, new_q
    cdef double e, c, bestc, delta_level
    cdef long steps = 0
    while steps < cap:
        bestc = INFINITY
        best_u = 0
        best_v = 0
        for u in range(d):
            for v in range(N):
                e = levels[nbr[x[u], v]] - levels[x[u]]
                c = 2.0 * e * f[u] + e * e * rdiag[u]
                if c < bestc:
                    bestc = c
                    best_u = u
                    best_v = v
        if not bestc < 0.0:
            break
        old_q = x[best_u]
        new_q = nbr[old_q, best_v]
        phi = phi + bestc
        x[best_u] = new_q
        delta_level = levels[new_q] - levels[old_q]
        for i in range(d):
            f[i] += delta_level * R[i, best_u]
        steps += 1
    return x, phi, steps
