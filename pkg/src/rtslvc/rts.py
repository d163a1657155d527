"""Reactive tabu search detector: public API and kernel selection.

The hot iteration loop lives in the compiled extension ``_search_core``
when available; otherwise the pure-Python twin in ``_search_py`` is used.
Set ``RTS_LVC_FORCE_PY=1`` to force the fallback (useful for benchmarks
and debugging). Both kernels are trajectory-identical.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import _search_py
from ._search_py import (  # noqa: F401  (re-exported reference ops)
    STOP_REASONS,
    cost_key,
    init_state,
    iterate_end,
    ml_cost,
    neighbor_cost_deltas,
    reactive_update,
    select_move,
    should_stop,
)
from .alphabet import NeighborTable
from .channel import RealProblem

try:
    from . import _search_core
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build without the extension
    _search_core = None
    HAVE_COMPILED = False


def _default_kernel():
    if HAVE_COMPILED and not os.environ.get("RTS_LVC_FORCE_PY"):
        return _search_core
    return _search_py


@dataclass(frozen=True)
class RtsParams:
    """Search tunables; defaults are the 4-QAM V-BLAST operating point."""

    P0: int = 2
    beta: float = 0.1
    alpha1: float = 0.05
    alpha2: float = 0.0005
    N: int = 1
    max_rep: int = 75
    min_iter: int = 20
    max_iter: int = 300

    def __post_init__(self):
        if self.P0 < 1 or self.beta <= 0 or self.alpha1 <= 0 or self.alpha2 <= 0:
            raise ValueError("P0 >= 1 and beta, alpha1, alpha2 > 0 required")
        if self.min_iter > self.max_iter:
            raise ValueError("min_iter must not exceed max_iter")


@dataclass(frozen=True)
class RtsResult:
    g: np.ndarray       # best solution found, level indices
    phi_g: float
    iters_used: int
    reps_seen: int
    stop_reason: str


def rts_detect(problem: RealProblem, initial: np.ndarray, params: RtsParams,
               neighbors: NeighborTable, force_python: bool = False) -> RtsResult:
    """Run the reactive tabu search from ``initial`` (level indices).

    Deterministic given (problem, initial, params).
    """
    initial = np.asarray(initial, dtype=np.int64)
    if initial.shape[0] != problem.d_t:
        raise ValueError(f"initial has {initial.shape[0]} coords, problem has {problem.d_t}")
    kern = _search_py if force_python else _default_kernel()
    g, phi_g, iters, reps, reason = kern.rts_search(
        problem.R, problem.y_mf, problem.ynorm2, initial,
        problem.alphabet.levels, neighbors.table, neighbors.reverse,
        params.P0, params.beta, params.alpha1, params.alpha2,
        params.max_rep, params.min_iter, params.max_iter,
    )
    return RtsResult(g=g, phi_g=float(phi_g), iters_used=int(iters),
                     reps_seen=int(reps), stop_reason=STOP_REASONS[reason])
