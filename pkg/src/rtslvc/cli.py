"""Command-line front end: scenario sweeps, CSV output, property verification."""

import argparse
import sys

import numpy as np

from .alphabet import build_alphabet, build_neighbor_table
from .baselines import DetectorKind, ml_oracle, mmse_detect
from .channel import (
    ChannelScenario,
    gen_isi_taps,
    gen_noise,
    gen_vblast,
    isi_effective_matrix,
    isi_time_to_freq,
    isi_transmit_time,
    make_problem,
    noise_var_vblast,
    realify,
    stbc_effective_matrix,
    stbc_encode,
)
from .rts import RtsParams, ml_cost, rts_detect
from .sim import BerRecord, SimConfig, rts_preset, sweep


def parse_snr(spec: str):
    """SNR points: a single value, a comma list, or start:stop:step (inclusive)."""
    if ":" in spec:
        start, stop, step = (float(p) for p in spec.split(":"))
        if step <= 0:
            raise ValueError("SNR step must be positive")
        n = int(round((stop - start) / step))
        pts = [start + i * step for i in range(n + 1)]
        return tuple(p for p in pts if p <= stop + 1e-9)
    if "," in spec:
        return tuple(float(p) for p in spec.split(","))
    return (float(spec),)


def write_csv(records, path) -> None:
    """Deterministic CSV emission; BER in scientific notation, zero spelled 0.000000e0."""
    lines = ["snr_db,frames,bits,errors,ber,mean_iters,mean_reps,wall_s"]
    for r in records:
        ber = "0.000000e0" if r.bit_errors == 0 else f"{r.ber:.6e}"
        lines.append(
            f"{r.snr_db:g},{r.frames_run},{r.bits_total},{r.bit_errors},{ber},"
            f"{r.mean_rts_iters:.3f},{r.mean_reps:.3f},{r.wall_seconds:.3f}"
        )
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_config(path) -> dict:
    """Flat key=value file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _add_common(sub, need_nt=True):
    sub.add_argument("--config", help="key=value config file; flags override it")
    if need_nt:
        sub.add_argument("--nt", type=int, help="transmit antennas")
        sub.add_argument("--nr", type=int, help="receive antennas")
    sub.add_argument("--mod", type=int, default=4, help="QAM order (4, 16, 64)")
    sub.add_argument("--snr", default="10", help="dB point, comma list, or start:stop:step")
    sub.add_argument("--frames", type=int, default=1000, help="max frames per SNR point")
    sub.add_argument("--target-errors", type=int, default=200,
                     help="stop a point early after this many bit errors (0 = never)")
    sub.add_argument("--seed", type=int, default=0, help="master seed")
    sub.add_argument("--workers", type=int, default=1,
                     help="parallel workers (RTS_LVC_THREADS overrides)")
    sub.add_argument("--detector", default="rts",
                     choices=[k.value for k in DetectorKind], help="detector to run")
    sub.add_argument("--out", help="CSV output path")
    for name, typ in (("P0", int), ("beta", float), ("alpha1", float), ("alpha2", float),
                      ("N", int), ("max-rep", int), ("min-iter", int), ("max-iter", int)):
        sub.add_argument(f"--{name}", type=typ, default=None,
                         help=f"override search parameter {name.replace('-', '_')}")


def _build_params(args, kind, M, K=0) -> RtsParams:
    p = rts_preset(kind, M, K)
    over = {}
    for attr in ("P0", "beta", "alpha1", "alpha2", "N", "max_rep", "min_iter", "max_iter"):
        v = getattr(args, attr)
        if v is not None:
            over[attr] = v
    if over:
        from dataclasses import replace
        p = replace(p, **over)
    return p


def _apply_config(parser, args, argv_tail):
    """Re-parse with config-file values as defaults; explicit flags win."""
    if args.config:
        cfg = read_config(args.config)
        known = {a.dest for a in parser._actions}
        bad = set(cfg) - known
        if bad:
            parser.error(f"unknown config keys: {sorted(bad)}")
        parser.set_defaults(**{k: type_convert(parser, k, v) for k, v in cfg.items()})
        args = parser.parse_args(argv_tail)
    return args


def type_convert(parser, dest, value):
    for a in parser._actions:
        if a.dest == dest and a.type is not None:
            return a.type(value)
    return value


def _run_scenario(args, kind, sub, argv_tail):
    args = _apply_config(sub, args, argv_tail)
    if args.nt is None:
        sub.error("--nt is required")
    nr = args.nr if args.nr is not None else args.nt
    try:
        snr_points = parse_snr(str(args.snr))
    except ValueError as exc:
        sub.error(str(exc))
    extra = {}
    if kind == "isi":
        extra = {"L": args.L, "K": args.K}
    scenario = ChannelScenario(kind=kind, N_t=args.nt, N_r=nr, M_complex=args.mod, **extra)
    params = _build_params(args, kind, args.mod, extra.get("K", 0))
    config = SimConfig(
        scenario=scenario,
        detector=DetectorKind(args.detector),
        rts_params=params,
        snr_points=snr_points,
        max_frames=args.frames,
        target_bit_errors=args.target_errors,
        master_seed=args.seed,
        workers=args.workers,
    )
    records = sweep(config)
    print(f"{'snr_db':>8} {'frames':>8} {'bits':>12} {'errors':>8} {'ber':>12} "
          f"{'iters':>8} {'reps':>7} {'wall_s':>8}")
    for r in records:
        ber = "0.000000e0" if r.bit_errors == 0 else f"{r.ber:.6e}"
        print(f"{r.snr_db:8g} {r.frames_run:8d} {r.bits_total:12d} {r.bit_errors:8d} "
              f"{ber:>12} {r.mean_rts_iters:8.1f} {r.mean_reps:7.1f} {r.wall_seconds:8.2f}")
    if args.out:
        write_csv(records, args.out)
        print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# verify: independent-construction property checks


def _verify_incremental(trials, rng, fault=False):
    from ._search_py import neighbor_cost_deltas
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 10))
        alph = build_alphabet(int(rng.choice([4, 16])))
        nbr = build_neighbor_table(alph, int(rng.integers(1, alph.M_real)))
        H = rng.standard_normal((d + 2, d))
        y = rng.standard_normal(d + 2)
        R = H.T @ H
        y_mf = H.T @ y
        x = rng.integers(0, alph.M_real, d)
        xl = alph.levels[x]
        f = R @ xl - y_mf
        C = neighbor_cost_deltas(f, x, alph.levels, nbr.table, np.diag(R).copy())
        phi = ml_cost(R, y_mf, xl)
        u = int(rng.integers(0, d))
        v = int(rng.integers(0, nbr.N))
        z = xl.copy()
        z[u] = alph.levels[nbr.table[x[u], v]]
        ref = ml_cost(R, y_mf, z) - phi
        err = abs(C[u, v] - ref) / max(1.0, abs(ref))
        if fault:
            err += 1.0
        worst = max(worst, err)
    return worst < 1e-9, f"worst rel err {worst:.2e}"


def _verify_isi_dual(trials, rng):
    worst = 0.0
    for _ in range(trials):
        L, K, nt, nr = 3, 8, 2, 2
        taps = gen_isi_taps(nt, nr, L, rng)
        x = (rng.standard_normal((K, nt)) + 1j * rng.standard_normal((K, nt)))
        r_time = isi_time_to_freq(isi_transmit_time(x, taps), K)
        Heff = isi_effective_matrix(taps, K)
        r_eff = Heff @ x.reshape(-1)
        worst = max(worst, np.linalg.norm(r_time - r_eff) / np.linalg.norm(r_eff))
    return worst < 1e-9, f"worst rel err {worst:.2e}"


def _verify_stbc(trials, rng):
    worst = 0.0
    for _ in range(trials):
        nt, nr = 2, 3
        H = gen_vblast(nt, nr, rng)
        data = rng.standard_normal(nt * nt) + 1j * rng.standard_normal(nt * nt)
        S = stbc_encode(data, nt)
        direct = (H @ S).T.reshape(-1)  # stack received vectors per channel use
        via_eff = stbc_effective_matrix(H) @ data
        worst = max(worst, np.linalg.norm(direct - via_eff) / np.linalg.norm(direct))
    return worst < 1e-9, f"worst rel err {worst:.2e}"


def _verify_dominance(trials, rng):
    alph = build_alphabet(4)
    nbr = build_neighbor_table(alph, 1)
    params = RtsParams()
    bad = 0
    for _ in range(trials):
        nt = 2
        H = gen_vblast(nt, nt, rng)
        var = noise_var_vblast(nt, alph.symbol_energy, 8.0)
        x_idx = rng.integers(0, alph.M_real, 2 * nt)
        xl = alph.levels[x_idx]
        y = H @ (xl[:nt] + 1j * xl[nt:]) + gen_noise(nt, var, rng)
        problem = make_problem(H, y, alph, var)
        res = rts_detect(problem, mmse_detect(problem), params, nbr)
        phi_ml = ml_cost(problem.R, problem.y_mf, alph.levels[ml_oracle(problem)])
        if res.phi_g < phi_ml - 1e-9 * max(1.0, abs(phi_ml)):
            bad += 1
    return bad == 0, f"{bad} frames beat the exhaustive oracle"


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    trials = args.trials
    checks = [
        ("incremental-cost equivalence",
         _verify_incremental(trials, rng, fault=args.inject_fault)),
        ("isi dual construction", _verify_isi_dual(max(1, trials // 10), rng)),
        ("stbc vectorization", _verify_stbc(max(1, trials // 10), rng)),
        ("oracle dominance", _verify_dominance(max(1, trials // 10), rng)),
    ]
    failed = 0
    for name, (ok, detail) in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rtslvc",
        description="Reactive tabu search detection for large-dimension linear vector channels",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub_v = subs.add_parser("vblast", help="flat-fading spatial multiplexing sweep")
    _add_common(sub_v)
    sub_s = subs.add_parser("stbc", help="non-orthogonal space-time block code sweep")
    _add_common(sub_s)
    sub_i = subs.add_parser("isi", help="cyclic-prefix dispersive channel sweep "
                                        "(--snr is Eb/N0 per receive antenna)")
    _add_common(sub_i)
    sub_i.add_argument("--L", type=int, default=1, help="multipath components")
    sub_i.add_argument("--K", type=int, default=64, help="frame length (symbols)")

    sub_ver = subs.add_parser("verify", help="run independent-construction property checks")
    sub_ver.add_argument("--trials", type=int, default=1000)
    sub_ver.add_argument("--seed", type=int, default=0)
    sub_ver.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    argv = list(argv) if argv is not None else sys.argv[1:]
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        sub = {"vblast": sub_v, "stbc": sub_s, "isi": sub_i}[args.command]
        return _run_scenario(args, args.command, sub, argv[1:])
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
