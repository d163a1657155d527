"""Compare the compiled search kernel against the pure-Python reference.

Runs identical reactive tabu search instances through both kernels and
reports wall time per frame plus the speedup. Results are bit-identical by
construction (the test suite asserts this); this script only measures speed.

Usage: python3 benchmarks/bench_kernels.py [--frames N]
"""

import argparse
import time

import numpy as np

import rtslvc
from rtslvc import _search_py as sp
from rtslvc.alphabet import build_alphabet, build_neighbor_table
from rtslvc.baselines import mmse_detect
from rtslvc.channel import gen_noise, gen_vblast, make_problem, noise_var_vblast
from rtslvc.sim import rts_preset


def make_instances(nt, M, snr_db, n, seed):
    a = build_alphabet(M)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        H = gen_vblast(nt, nt, rng)
        var = noise_var_vblast(nt, a.symbol_energy, snr_db)
        idx = rng.integers(0, a.M_real, 2 * nt)
        lv = a.levels[idx]
        y = H @ (lv[:nt] + 1j * lv[nt:]) + gen_noise(nt, var, rng)
        p = make_problem(H, y, a, var)
        out.append((p, mmse_detect(p)))
    return a, out


def bench(kernel, instances, alphabet, params, nbr):
    t0 = time.perf_counter()
    total_iters = 0
    for p, init in instances:
        _, _, iters, _, _ = kernel.rts_search(
            p.R, p.y_mf, p.ynorm2, init, alphabet.levels, nbr.table,
            nbr.reverse, params.P0, params.beta, params.alpha1, params.alpha2,
            params.max_rep, params.min_iter, params.max_iter)
        total_iters += iters
    return time.perf_counter() - t0, total_iters


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=200, help="frames per case")
    args = ap.parse_args()

    if not rtslvc.HAVE_COMPILED:
        raise SystemExit("compiled kernel not available; build the extension first")
    from rtslvc import _search_core as cc

    cases = [
        ("4x4 4-QAM @ 10 dB", 4, 4, 10.0),
        ("8x8 4-QAM @ 10 dB", 8, 4, 10.0),
        ("16x16 4-QAM @ 9 dB", 16, 4, 9.0),
        ("8x8 16-QAM @ 16 dB", 8, 16, 16.0),
    ]
    print(f"{'case':>20} {'frames':>7} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for name, nt, M, snr_db in cases:
        a, inst = make_instances(nt, M, snr_db, args.frames, seed=123)
        params = rts_preset("vblast", M)
        nbr = build_neighbor_table(a, params.N)
        t_py, it_py = bench(sp, inst, a, params, nbr)
        t_cc, it_cc = bench(cc, inst, a, params, nbr)
        assert it_py == it_cc  # identical trajectories
        print(f"{name:>20} {args.frames:>7} {t_py / args.frames * 1e3:>10.2f}ms "
              f"{t_cc / args.frames * 1e3:>10.2f}ms {t_py / t_cc:>7.1f}x")


if __name__ == "__main__":
    main()
