"""Pure-Python search kernels (reference implementation).

Implements the reactive tabu search iteration and the greedy likelihood
ascent search over the real PAM lattice. The compiled extension in
``_search_core`` mirrors these routines step for step; both must produce
bit-identical trajectories, which the test suite asserts.

All kernels work on level *indices*: ``x[u]`` indexes ``levels``, the
neighbor table ``nbr[q, v]`` gives the level index of the v-th nearest
symbol to level q, and ``rev[q_new, q_old]`` inverts it (-1 if absent).
"""

import math
from dataclasses import dataclass, field

import numpy as np

STOP_BOUND = 0
STOP_RELAXED_BOUND = 1
STOP_MAX_REP = 2
STOP_MAX_ITER = 3

STOP_REASONS = ("bound", "relaxed_bound", "max_rep", "max_iter")


def cost_key(phi: float) -> float:
    """Quantize a cost to 12 significant digits for repetition lookups."""
    phi = float(phi)  # builtin float: np.float64.__round__ rounds differently
    if phi == 0.0 or not math.isfinite(phi):
        return 0.0
    return round(phi, 11 - int(math.floor(math.log10(abs(phi)))))


def ml_cost(R: np.ndarray, y_mf: np.ndarray, x_levels: np.ndarray) -> float:
    """phi(x) = x^T R x - 2 x^T y_MF (residual norm minus ||y||^2)."""
    if x_levels.shape[0] != R.shape[0]:
        raise ValueError(f"dimension mismatch: R is {R.shape}, x has {x_levels.shape[0]} entries")
    return float(x_levels @ R @ x_levels - 2.0 * (x_levels @ y_mf))


def neighbor_cost_deltas(f, x_idx, levels, nbr, rdiag):
    """C(u, v) = 2 e f_u + e^2 R(u,u) with e = w_v(x_u) - x_u.

    Equals phi(z(u,v)) - phi(x) exactly; one row per coordinate, one column
    per symbol-neighbor.
    """
    xl = levels[x_idx]
    E = levels[nbr[x_idx]] - xl[:, None]
    return 2.0 * E * f[:, None] + E * E * rdiag[:, None]


@dataclass
class RtsState:
    """Mutable state of one reactive tabu search run."""

    x: np.ndarray           # current solution, level indices
    g: np.ndarray           # best-so-far solution
    phi_x: float
    phi_g: float
    f: np.ndarray           # R x - y_MF
    T: np.ndarray           # tabu matrix, (d_t * M, N) non-negative ints
    P: int                  # current tabu period
    iters: int = 0          # completed iterations; x is x^(iters)
    lflag: int = 0
    rep_count: int = 0
    l_rep: float = 0.0
    last_P_change: int = 0
    cost_hist: dict = field(default_factory=dict)
    stop_reason: int = STOP_MAX_ITER


def init_state(R, y_mf, x0_idx, levels, P0) -> RtsState:
    d = R.shape[0]
    M = len(levels)
    x = np.asarray(x0_idx, dtype=np.int64).copy()
    xl = levels[x]
    phi0 = ml_cost(R, y_mf, xl)
    st = RtsState(
        x=x,
        g=x.copy(),
        phi_x=phi0,
        phi_g=phi0,
        f=R @ xl - y_mf,
        T=np.zeros((d * M, 1), dtype=np.int64),  # widened by caller for N > 1
        P=int(P0),
    )
    st.cost_hist[cost_key(phi0)] = 0
    return st


def select_move(state: RtsState, C: np.ndarray, nbr: np.ndarray):
    """Best permissible move: ascending C, ties toward smaller (u, v).

    A move is permitted if it beats the best cost so far (aspiration) or its
    tabu entry is zero. If every candidate is tabu, all tabu entries are
    decremented by the smallest entry among the blocked candidates until one
    opens up.
    """
    d, N = C.shape
    M = nbr.shape[0]
    order = np.argsort(C.ravel(), kind="stable")
    while True:
        for flat in order:
            u = int(flat) // N
            v = int(flat) % N
            if state.phi_x + C[u, v] < state.phi_g:
                return u, v
            if state.T[u * M + state.x[u], v] == 0:
                return u, v
        cand_rows = np.arange(d) * M + state.x
        dec = int(state.T[cand_rows].min())
        np.maximum(state.T - dec, 0, out=state.T)


def reactive_update(state: RtsState, u: int, v: int, new_phi: float,
                    old_q: int, new_q: int, beta: float, rev: np.ndarray, M: int):
    """Repetition bookkeeping, tabu-period adaptation and tabu writes."""
    idx = state.iters + 1  # index of the solution just produced
    key = cost_key(new_phi)
    last = state.cost_hist.get(key)
    if last is not None:
        gap = idx - last
        state.rep_count += 1
        state.l_rep += (gap - state.l_rep) / state.rep_count
        state.P += 1
        state.last_P_change = idx
    state.cost_hist[key] = idx
    if state.rep_count > 0 and idx - state.last_P_change > beta * state.l_rep:
        state.P = max(1, state.P - 1)
        state.last_P_change = idx
    fwd = u * M + old_q
    vrev = rev[new_q, old_q]
    if new_phi < state.phi_g:
        state.T[fwd, v] = 0
        if vrev >= 0:
            state.T[u * M + new_q, vrev] = 0
        state.g = state.x.copy()
        state.phi_g = new_phi
    else:
        state.T[fwd, v] = state.P + 1
        if vrev >= 0:
            state.T[u * M + new_q, vrev] = state.P + 1
        state.lflag = 1


def iterate_end(state: RtsState, R: np.ndarray, u: int, delta_level: float):
    """Tabu decay, rank-one f update, iteration counter."""
    np.maximum(state.T - 1, 0, out=state.T)
    state.f += delta_level * R[:, u]
    state.iters += 1


def should_stop(state: RtsState, ynorm2: float, alpha1: float, alpha2: float,
                max_rep: int, min_iter: int, max_iter: int) -> bool:
    m = state.iters
    if ynorm2 >= 1e-12:
        ratio = abs(state.phi_g + ynorm2) / ynorm2
        if state.lflag and m >= min_iter and ratio < alpha1:
            state.stop_reason = STOP_BOUND
            return True
        if state.lflag and ratio < m * alpha2:
            state.stop_reason = STOP_RELAXED_BOUND
            return True
    if state.rep_count > max_rep:
        state.stop_reason = STOP_MAX_REP
        return True
    if m >= max_iter:
        state.stop_reason = STOP_MAX_ITER
        return True
    return False


def rts_search(R, y_mf, ynorm2, x0_idx, levels, nbr, rev,
               P0, beta, alpha1, alpha2, max_rep, min_iter, max_iter):
    """Full reactive tabu search run; returns (g, phi_g, iters, reps, stop_reason)."""
    d = R.shape[0]
    M, N = nbr.shape
    rdiag = np.ascontiguousarray(np.diag(R))
    state = init_state(R, y_mf, x0_idx, levels, P0)
    state.T = np.zeros((d * M, N), dtype=np.int64)
    while True:
        state.lflag = 0
        C = neighbor_cost_deltas(state.f, state.x, levels, nbr, rdiag)
        u, v = select_move(state, C, nbr)
        old_q = int(state.x[u])
        new_q = int(nbr[old_q, v])
        new_phi = state.phi_x + C[u, v]
        state.x[u] = new_q
        reactive_update(state, u, v, new_phi, old_q, new_q, beta, rev, M)
        iterate_end(state, R, u, levels[new_q] - levels[old_q])
        state.phi_x = new_phi
        if should_stop(state, ynorm2, alpha1, alpha2, max_rep, min_iter, max_iter):
            break
    return state.g, state.phi_g, state.iters, state.rep_count, state.stop_reason


def las_search(R, y_mf, x0_idx, levels, nbr, max_steps=None):
    """Steepest-descent single-coordinate search; stops at the first local minimum.

    Returns (x, phi, steps). Same move table and tie-breaking as the tabu
    search, so the tabu search's greedy phase follows the same trajectory.
    """
    d = R.shape[0]
    N = nbr.shape[1]
    rdiag = np.ascontiguousarray(np.diag(R))
    x = np.asarray(x0_idx, dtype=np.int64).copy()
    xl = levels[x]
    phi = ml_cost(R, y_mf, xl)
    f = R @ xl - y_mf
    if max_steps is None:
        max_steps = 10 * d * N + 100
    steps = 0
    while steps < max_steps:
        C = neighbor_cost_deltas(f, x, levels, nbr, rdiag)
        flat = int(np.argmin(C.ravel()))  # first occurrence on ties
        u, v = flat // N, flat % N
        if not C[u, v] < 0.0:
            break
        old_q = int(x[u])
        new_q = int(nbr[old_q, v])
        phi = phi + C[u, v]
        x[u] = new_q
        f += (levels[new_q] - levels[old_q]) * R[:, u]
        steps += 1
    return x, phi, steps
