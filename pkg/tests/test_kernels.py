import numpy as np
import pytest

import rtslvc
from rtslvc import _search_py as sp
from rtslvc.alphabet import build_alphabet, build_neighbor_table
from rtslvc.baselines import mmse_detect
from rtslvc.channel import gen_noise, gen_vblast, make_problem, noise_var_vblast
from rtslvc.rts import RtsParams, rts_detect

pytestmark = pytest.mark.skipif(not rtslvc.HAVE_COMPILED,
                                reason="compiled kernel unavailable")

from rtslvc import _search_core as cc  # noqa: E402


def _instance(rng, nt, M, snr_db):
    a = build_alphabet(M)
    H = gen_vblast(nt, nt, rng)
    var = noise_var_vblast(nt, a.symbol_energy, snr_db)
    idx = rng.integers(0, a.M_real, 2 * nt)
    lv = a.levels[idx]
    y = H @ (lv[:nt] + 1j * lv[nt:]) + gen_noise(nt, var, rng)
    return make_problem(H, y, a, var)


CASES = [
    (4, 4, 1, 10.0, RtsParams()),
    (8, 4, 1, 6.0, RtsParams()),
    (16, 4, 1, 9.0, RtsParams()),
    (4, 16, 3, 14.0, RtsParams(beta=0.01, alpha1=0.003, alpha2=1e-5, N=3,
                               max_rep=250, min_iter=30, max_iter=1000)),
    (4, 64, 2, 20.0, RtsParams(beta=0.01, alpha1=5e-5, alpha2=5e-7, N=2,
                               max_rep=1000, min_iter=50, max_iter=3000)),
]


@pytest.mark.parametrize("nt,M,N,snr_db,params", CASES)
def test_rts_kernels_bit_identical(nt, M, N, snr_db, params):
    rng = np.random.default_rng(1000 * nt + M)
    a = build_alphabet(M)
    nbr = build_neighbor_table(a, N)
    for _ in range(25):
        p = _instance(rng, nt, M, snr_db)
        init = mmse_detect(p)
        args = (p.R, p.y_mf, p.ynorm2, init, a.levels, nbr.table, nbr.reverse,
                params.P0, params.beta, params.alpha1, params.alpha2,
                params.max_rep, params.min_iter, params.max_iter)
        g1, phi1, it1, rp1, sr1 = sp.rts_search(*args)
        g2, phi2, it2, rp2, sr2 = cc.rts_search(*args)
        assert np.array_equal(g1, g2)
        assert phi1 == phi2  # bitwise, not approx
        assert (it1, rp1, sr1) == (it2, rp2, sr2)


def test_las_kernels_bit_identical():
    rng = np.random.default_rng(77)
    a = build_alphabet(4)
    nbr = build_neighbor_table(a, 1)
    for _ in range(50):
        p = _instance(rng, 8, 4, 7.0)
        init = mmse_detect(p)
        x1, phi1, s1 = sp.las_search(p.R, p.y_mf, init, a.levels, nbr.table)
        x2, phi2, s2 = cc.las_search(p.R, p.y_mf, init, a.levels, nbr.table)
        assert np.array_equal(x1, x2)
        assert phi1 == phi2 and s1 == s2


def test_force_python_env_round_trip(monkeypatch):
    rng = np.random.default_rng(5)
    p = _instance(rng, 6, 4, 9.0)
    nbr = build_neighbor_table(p.alphabet, 1)
    init = mmse_detect(p)
    fast = rts_detect(p, init, RtsParams(), nbr)
    monkeypatch.setenv("RTS_LVC_FORCE_PY", "1")
    slow = rts_detect(p, init, RtsParams(), nbr)
    assert np.array_equal(fast.g, slow.g)
    assert fast.phi_g == slow.phi_g
    assert (fast.iters_used, fast.reps_seen, fast.stop_reason) == \
           (slow.iters_used, slow.reps_seen, slow.stop_reason)
