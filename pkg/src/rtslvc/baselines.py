"""Reference detectors: MMSE initializers, greedy search, exhaustive ML."""

import itertools
import os
from enum import Enum

import numpy as np

from . import _search_py
from .alphabet import Alphabet, NeighborTable, quantize
from .channel import RealProblem, isi_tone_matrices

try:
    from . import _search_core
except ImportError:  # pragma: no cover
    _search_core = None


class DetectorKind(str, Enum):
    MMSE = "mmse"
    FD_MMSE = "fdmmse"
    LAS = "las"
    RTS = "rts"
    ML_ORACLE = "ml"


def mmse_detect(problem: RealProblem) -> np.ndarray:
    """Regularized linear estimate (R + (sigma^2/2) I)^-1 y_MF, quantized per coordinate."""
    reg = problem.noise_var_per_real_dim
    A = problem.R + reg * np.eye(problem.d_t)
    est = np.linalg.solve(A, problem.y_mf)
    return quantize(problem.alphabet, est)


def fd_mmse_detect(taps: np.ndarray, K: int, r: np.ndarray, N0: float,
                   alphabet: Alphabet) -> np.ndarray:
    """Per-tone MMSE nulling followed by a K-point IDFT, quantized.

    ``r`` stacks the K tone observations; the result is the real solution
    vector [Re; Im] of the time-domain frame, as level indices.
    """
    G = isi_tone_matrices(taps, K)
    _, N_r, N_t = G.shape
    rk = r.reshape(K, N_r)
    Es = alphabet.symbol_energy
    u_hat = np.empty((K, N_t), dtype=np.complex128)
    for i in range(K):
        Gi = G[i]
        A = Gi.conj().T @ Gi + (N0 / Es) * np.eye(N_t)
        u_hat[i] = np.linalg.solve(A, Gi.conj().T @ rk[i])
    x_hat = np.fft.ifft(u_hat, axis=0) * np.sqrt(K)
    xv = x_hat.reshape(-1)
    est = np.concatenate([xv.real, xv.imag])
    return quantize(alphabet, est)


def las_detect(problem: RealProblem, initial: np.ndarray,
               neighbors: NeighborTable, force_python: bool = False) -> np.ndarray:
    """Steepest-descent search from ``initial``; returns the first local minimum."""
    kern = _search_py
    if _search_core is not None and not force_python and not os.environ.get("RTS_LVC_FORCE_PY"):
        kern = _search_core
    x, _, _ = kern.las_search(problem.R, problem.y_mf,
                              np.asarray(initial, dtype=np.int64),
                              problem.alphabet.levels, neighbors.table)
    return x


def ml_oracle(problem: RealProblem, max_candidates: int = 1 << 20) -> np.ndarray:
    """Exhaustive minimizer of the ML cost; ties break to the lexicographically smaller vector."""
    d = problem.d_t
    M = problem.alphabet.M_real
    n_cand = M**d
    if n_cand > max_candidates:
        raise ValueError(f"search space {M}^{d} exceeds {max_candidates} candidates")
    lv = problem.alphabet.levels
    grid = np.array(list(itertools.product(range(M), repeat=d)), dtype=np.int64)
    X = lv[grid]
    phis = np.einsum("ij,jk,ik->i", X, problem.R, X) - 2.0 * X @ problem.y_mf
    # lexicographic tie-break: itertools.product emits candidates in
    # ascending lexicographic order and argmin keeps the first minimum
    best = int(np.argmin(phis))
    return grid[best]
