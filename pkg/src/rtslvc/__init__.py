"""Reactive tabu search detection for large-dimension linear vector channels."""

from .alphabet import Alphabet, NeighborTable, build_alphabet, build_neighbor_table
from .baselines import DetectorKind, fd_mmse_detect, las_detect, ml_oracle, mmse_detect
from .channel import ChannelScenario, RealProblem, make_problem, realify
from .rts import HAVE_COMPILED, RtsParams, RtsResult, ml_cost, rts_detect
from .sim import BerRecord, SimConfig, rts_preset, run_point, siso_awgn_reference, sweep

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "NeighborTable", "build_alphabet", "build_neighbor_table",
    "DetectorKind", "fd_mmse_detect", "las_detect", "ml_oracle", "mmse_detect",
    "ChannelScenario", "RealProblem", "make_problem", "realify",
    "HAVE_COMPILED", "RtsParams", "RtsResult", "ml_cost", "rts_detect",
    "BerRecord", "SimConfig", "rts_preset", "run_point", "siso_awgn_reference", "sweep",
]
