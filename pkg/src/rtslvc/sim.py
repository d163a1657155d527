"""Seeded Monte Carlo BER harness.

Frames are generated from per-frame RNG substreams derived from
(master_seed, SNR point, frame index), so results are bit-identical
regardless of worker count and frames can be distributed freely.
"""

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .alphabet import (
    Alphabet,
    NeighborTable,
    build_alphabet,
    build_neighbor_table,
    bits_to_vector,
    vector_to_bits,
)
from .baselines import DetectorKind, fd_mmse_detect, las_detect, ml_oracle, mmse_detect
from .channel import (
    ChannelScenario,
    gen_isi_taps,
    gen_noise,
    gen_vblast,
    isi_noise_var,
    isi_problem,
    isi_tone_matrices,
    make_problem,
    noise_var_vblast,
    stbc_effective_matrix,
)
from .rts import RtsParams, rts_detect

_BATCH = 256  # early-stop check granularity; fixed so results are worker-independent


def rts_preset(kind: str, M_complex: int, K: int = 0) -> RtsParams:
    """Per-scenario search parameters from the published operating points."""
    if kind == "isi":
        if K and K > 128:
            return RtsParams(P0=2, beta=1.0, alpha1=0.03, alpha2=0.0004,
                             N=1, max_rep=75, min_iter=30, max_iter=500)
        return RtsParams(P0=2, beta=1.0, alpha1=0.03, alpha2=0.00075,
                         N=1, max_rep=75, min_iter=30, max_iter=300)
    if M_complex == 16:
        p = RtsParams(P0=2, beta=0.01, alpha1=0.003, alpha2=1e-5,
                      N=3, max_rep=250, min_iter=30, max_iter=1000)
    elif M_complex == 64:
        p = RtsParams(P0=2, beta=0.01, alpha1=5e-5, alpha2=5e-7,
                      N=2, max_rep=1000, min_iter=50, max_iter=3000)
    else:
        p = RtsParams()
    if kind == "stbc":
        p = replace(p, beta=1.0)
    return p


@dataclass(frozen=True)
class SimConfig:
    scenario: ChannelScenario
    detector: DetectorKind = DetectorKind.RTS
    rts_params: Optional[RtsParams] = None
    snr_points: tuple = (10.0,)
    max_frames: int = 1000
    target_bit_errors: int = 200
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if not self.snr_points:
            raise ValueError("need at least one SNR point")

    def params(self) -> RtsParams:
        if self.rts_params is not None:
            return self.rts_params
        return rts_preset(self.scenario.kind, self.scenario.M_complex, self.scenario.K)


@dataclass
class BerRecord:
    snr_db: float
    frames_run: int
    bits_total: int
    bit_errors: int
    ber: float
    mean_rts_iters: float
    mean_reps: float
    stop_reason_hist: dict = field(default_factory=dict)
    wall_seconds: float = 0.0
    detector: str = "rts"
    master_seed: int = 0


def _frame_rng(master_seed: int, snr_db: float, frame_idx: int) -> np.random.Generator:
    point_key = int(round(snr_db * 1000.0)) % (1 << 32)
    return np.random.default_rng([master_seed, point_key, frame_idx])


def run_frame(scenario: ChannelScenario, snr_db: float, detector: DetectorKind,
              params: RtsParams, rng: np.random.Generator,
              alphabet: Optional[Alphabet] = None,
              neighbors: Optional[NeighborTable] = None):
    """One draw: channel + data + noise, detect, count bit errors.

    Returns (bit_errors, bits, iters, reps, stop_reason).
    """
    alph = alphabet if alphabet is not None else build_alphabet(scenario.M_complex)
    nbr = neighbors if neighbors is not None else build_neighbor_table(alph, params.N)
    Es = alph.symbol_energy
    nt, nr = scenario.N_t, scenario.N_r

    if scenario.kind == "vblast":
        d_t = 2 * nt
        bits = rng.integers(0, 2, d_t * alph.bits_per_level)
        x_idx = bits_to_vector(alph, bits)
        xl = alph.levels[x_idx]
        x_c = xl[:nt] + 1j * xl[nt:]
        H = gen_vblast(nt, nr, rng)
        var = noise_var_vblast(nt, Es, snr_db)
        y = H @ x_c + gen_noise(nr, var, rng)
        problem = make_problem(H, y, alph, var)
        taps = K = N0 = None
    elif scenario.kind == "stbc":
        d_t = 2 * nt * nt
        bits = rng.integers(0, 2, d_t * alph.bits_per_level)
        x_idx = bits_to_vector(alph, bits)
        xl = alph.levels[x_idx]
        data = xl[:nt * nt] + 1j * xl[nt * nt:]
        H = gen_vblast(nt, nr, rng)
        A = stbc_effective_matrix(H, scenario.stbc_delta, scenario.stbc_t)
        # unnormalized codeword entries carry N_t symbols each, so the
        # received power per antenna per use is N_t^2 E_s
        var = noise_var_vblast(nt * nt, Es, snr_db)
        y = A @ data + gen_noise(nt * nr, var, rng)
        problem = make_problem(A, y, alph, var)
        taps = K = N0 = None
    elif scenario.kind == "isi":
        K = scenario.K
        d_t = 2 * nt * K
        bits = rng.integers(0, 2, d_t * alph.bits_per_level)
        x_idx = bits_to_vector(alph, bits)
        xl = alph.levels[x_idx]
        xv = xl[:nt * K] + 1j * xl[nt * K:]
        x_time = xv.reshape(K, nt)
        taps = gen_isi_taps(nt, nr, scenario.L, rng)
        N0 = isi_noise_var(nt, scenario.L, scenario.M_complex, Es, snr_db)
        G = isi_tone_matrices(taps, K)
        u = np.fft.fft(x_time, axis=0) / np.sqrt(K)
        r = (np.einsum("irt,it->ir", G, u) + gen_noise((K, nr), N0, rng)).reshape(-1)
        problem = isi_problem(taps, K, r, alph, N0)
    else:  # pragma: no cover
        raise ValueError(scenario.kind)

    iters = reps = 0
    reason = ""
    if detector == DetectorKind.ML_ORACLE:
        det = ml_oracle(problem)
    elif detector in (DetectorKind.MMSE, DetectorKind.FD_MMSE) and scenario.kind == "isi":
        det = fd_mmse_detect(taps, K, r, N0, alph)
    elif detector == DetectorKind.MMSE or detector == DetectorKind.FD_MMSE:
        det = mmse_detect(problem)
    else:
        if scenario.kind == "isi":
            init = fd_mmse_detect(taps, K, r, N0, alph)
        else:
            init = mmse_detect(problem)
        if detector == DetectorKind.LAS:
            det = las_detect(problem, init, nbr)
        else:
            res = rts_detect(problem, init, params, nbr)
            det = res.g
            iters, reps, reason = res.iters_used, res.reps_seen, res.stop_reason

    errors = int(np.count_nonzero(vector_to_bits(alph, det) != bits))
    return errors, bits.size, iters, reps, reason


def _frame_batch(scenario, snr_db, detector, params, master_seed, frame_indices):
    alph = build_alphabet(scenario.M_complex)
    nbr = build_neighbor_table(alph, params.N)
    errors = bits = iters = reps = 0
    hist: dict = {}
    for idx in frame_indices:
        rng = _frame_rng(master_seed, snr_db, idx)
        e, b, it, rp, reason = run_frame(scenario, snr_db, detector, params, rng, alph, nbr)
        errors += e
        bits += b
        iters += it
        reps += rp
        if reason:
            hist[reason] = hist.get(reason, 0) + 1
    return errors, bits, iters, reps, hist


def run_point(config: SimConfig, snr_db: float) -> BerRecord:
    """Simulate one SNR point until max_frames or target_bit_errors."""
    t0 = time.perf_counter()
    params = config.params()
    workers = int(os.environ.get("RTS_LVC_THREADS", config.workers))
    errors = bits = iters = reps = frames = 0
    hist: dict = {}
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frames < config.max_frames:
            batch = min(_BATCH, config.max_frames - frames)
            idxs = list(range(frames, frames + batch))
            if pool is not None:
                chunks = [idxs[i::workers] for i in range(workers) if idxs[i::workers]]
                results = pool.map(_frame_batch,
                                   *zip(*[(config.scenario, snr_db, config.detector,
                                           params, config.master_seed, c) for c in chunks]))
            else:
                results = [_frame_batch(config.scenario, snr_db, config.detector,
                                        params, config.master_seed, idxs)]
            for e, b, it, rp, h in results:
                errors += e
                bits += b
                iters += it
                reps += rp
                for k, n in h.items():
                    hist[k] = hist.get(k, 0) + n
            frames += batch
            if config.target_bit_errors > 0 and errors >= config.target_bit_errors:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return BerRecord(
        snr_db=snr_db,
        frames_run=frames,
        bits_total=bits,
        bit_errors=errors,
        ber=errors / bits if bits else 0.0,
        mean_rts_iters=iters / frames if frames else 0.0,
        mean_reps=reps / frames if frames else 0.0,
        stop_reason_hist=hist,
        wall_seconds=time.perf_counter() - t0,
        detector=config.detector.value,
        master_seed=config.master_seed,
    )


def sweep(config: SimConfig):
    """One BerRecord per SNR point, in input order."""
    return [run_point(config, s) for s in config.snr_points]


def _qfunc(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def siso_awgn_reference(M_complex: int, snr_db: float) -> float:
    """Exact Gray-coded square-QAM bit error rate on the AWGN channel.

    Computed per PAM axis by integrating the Gaussian over the decision
    regions and counting Hamming distances of the Gray labels.
    """
    alph = build_alphabet(M_complex)
    lv = alph.levels
    M = alph.M_real
    Es = alph.symbol_energy
    N0 = Es / 10.0 ** (snr_db / 10.0)
    sigma = math.sqrt(N0 / 2.0)
    bounds = (lv[:-1] + lv[1:]) / 2.0
    total = 0.0
    for i in range(M):
        cdf = [1.0] + [_qfunc((b - lv[i]) / sigma) for b in bounds] + [0.0]
        for j in range(M):
            pj = cdf[j] - cdf[j + 1]
            total += pj * int(np.sum(alph.labels[i] != alph.labels[j]))
    return total / (M * alph.bits_per_level)


def simo_mrc_rayleigh_reference(n_branches: int, ebn0_db: float) -> float:
    """4-QAM BER with maximal-ratio combining over i.i.d. Rayleigh branches.

    Closed form for coherent QPSK diversity reception; serves as the lower
    bound curve for the dispersive-channel experiments.
    """
    gc = 10.0 ** (ebn0_db / 10.0)
    mu = math.sqrt(gc / (1.0 + gc))
    p = 0.5 * (1.0 - mu)
    total = 0.0
    for k in range(n_branches):
        total += math.comb(n_branches - 1 + k, k) * (1.0 - p) ** k
    return p**n_branches * total
