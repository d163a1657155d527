import numpy as np
import pytest

from rtslvc.alphabet import build_alphabet
from rtslvc.channel import (
    ChannelScenario,
    gen_isi_taps,
    gen_vblast,
    isi_effective_matrix,
    isi_noise_var,
    isi_problem,
    isi_time_to_freq,
    isi_tone_matrices,
    isi_transmit_time,
    make_problem,
    noise_var_vblast,
    realify,
    stbc_effective_matrix,
    stbc_encode,
)


def _realified(v):
    return np.concatenate([v.real, v.imag])


def test_realify_rotation():
    Ht, yt = realify(np.array([[1j]]), np.array([1j]))
    assert np.array_equal(Ht, [[0.0, -1.0], [1.0, 0.0]])
    assert Ht @ [1.0, 0.0] == pytest.approx([0.0, 1.0])


def test_realify_identity():
    Ht, _ = realify(np.eye(2, dtype=complex), np.zeros(2, dtype=complex))
    assert np.array_equal(Ht, np.eye(4))


def test_realify_multiplication_oracle():
    rng = np.random.default_rng(0)
    H = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    Ht, _ = realify(H, np.zeros(3, dtype=complex))
    assert np.linalg.norm(Ht @ _realified(x) - _realified(H @ x)) < 1e-12


def test_realify_norm_preserving():
    rng = np.random.default_rng(1)
    y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    _, yt = realify(np.zeros((5, 1), dtype=complex), y)
    assert yt @ yt == pytest.approx(np.real(np.vdot(y, y)))


def test_realify_mismatch():
    with pytest.raises(ValueError):
        realify(np.eye(2, dtype=complex), np.zeros(3, dtype=complex))


def test_gen_vblast_statistics():
    rng = np.random.default_rng(2)
    H = gen_vblast(1000, 1000, rng)
    assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, abs=0.01)


def test_gen_vblast_determinism_and_shape():
    H1 = gen_vblast(64, 64, np.random.default_rng(7))
    H2 = gen_vblast(64, 64, np.random.default_rng(7))
    assert H1.shape == (64, 64)
    assert np.array_equal(H1, H2)
    assert np.all(np.isfinite(H1.real)) and np.all(np.isfinite(H1.imag))


def test_noise_var_vblast():
    assert noise_var_vblast(1, 2.0, 10.0) == pytest.approx(0.2)
    assert noise_var_vblast(32, 10.0, 0.0) == pytest.approx(320.0)


def test_gram_psd():
    rng = np.random.default_rng(3)
    for _ in range(10):
        H = gen_vblast(6, 8, rng)
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        p = make_problem(H, y, build_alphabet(4), 0.1)
        assert np.allclose(p.R, p.R.T)
        assert np.linalg.eigvalsh(p.R).min() >= -1e-9


# ---------------------------------------------------------------------------
# STBC


def test_stbc_encode_degenerate():
    S = stbc_encode(np.array([2.0 + 1j]), 1)
    assert S.shape == (1, 1)
    assert S[0, 0] == 2.0 + 1j


def test_stbc_encode_2x2():
    x = np.array([1 + 2j, 3 - 1j, -2 + 1j, 0.5j])
    S = stbc_encode(x, 2)
    expect = np.array([[x[0] + x[1], x[2] - x[3]], [x[2] + x[3], x[0] - x[1]]])
    assert np.abs(S - expect).max() < 1e-12


def test_stbc_encode_energy():
    # with |omega| = |t| = |delta| = 1 each entry sums N_t independent
    # symbols, so E||S||_F^2 = N_t^3 E_s by linearity
    rng = np.random.default_rng(4)
    a = build_alphabet(4)
    nt = 3
    tot = 0.0
    trials = 4000
    for _ in range(trials):
        idx = rng.integers(0, a.M_real, 2 * nt * nt)
        lv = a.levels[idx]
        data = lv[:nt * nt] + 1j * lv[nt * nt:]
        tot += np.linalg.norm(stbc_encode(data, nt), "fro") ** 2
    assert tot / trials == pytest.approx(nt**3 * a.symbol_energy, rel=0.05)


def test_stbc_encode_size_mismatch():
    with pytest.raises(ValueError):
        stbc_encode(np.zeros(3, dtype=complex), 2)


def test_stbc_effective_reduces_to_vblast():
    rng = np.random.default_rng(5)
    H = gen_vblast(1, 3, rng)
    assert np.abs(stbc_effective_matrix(H) - H).max() < 1e-12


def test_stbc_effective_equivalence():
    rng = np.random.default_rng(6)
    for _ in range(20):
        H = gen_vblast(2, 2, rng)
        data = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        direct = (H @ stbc_encode(data, 2)).T.reshape(-1)
        via = stbc_effective_matrix(H) @ data
        assert np.linalg.norm(direct - via) / np.linalg.norm(direct) < 1e-10


def test_stbc_dimensions():
    H = gen_vblast(4, 4, np.random.default_rng(7))
    p = make_problem(stbc_effective_matrix(H), np.zeros(16, dtype=complex),
                     build_alphabet(4), 0.1)
    assert p.R.shape == (32, 32)
    assert p.H.shape == (32, 32)  # d_r = 2 N_t N_r = 32


# ---------------------------------------------------------------------------
# MIMO-ISI


def test_isi_taps_flat_case():
    taps = gen_isi_taps(2, 2, 1, np.random.default_rng(8))
    assert taps.shape == (1, 2, 2)
    assert np.array_equal(isi_tone_matrices(taps, 4)[0], taps[0])


def test_isi_taps_statistics_and_determinism():
    rng = np.random.default_rng(9)
    taps = gen_isi_taps(100, 100, 100, rng)
    assert np.mean(np.abs(taps) ** 2) == pytest.approx(1.0, abs=0.01)
    t2 = gen_isi_taps(100, 100, 100, np.random.default_rng(9))
    assert np.array_equal(taps, t2)


def test_isi_single_tone():
    taps = gen_isi_taps(2, 3, 1, np.random.default_rng(10))
    Heff = isi_effective_matrix(taps, 1)
    assert np.abs(Heff - taps[0]).max() < 1e-12


def test_isi_dual_construction():
    rng = np.random.default_rng(11)
    for nt in (2, 4):
        taps = gen_isi_taps(nt, nt, 3, rng)
        K = 8
        x = rng.standard_normal((K, nt)) + 1j * rng.standard_normal((K, nt))
        via_time = isi_time_to_freq(isi_transmit_time(x, taps), K)
        via_eff = isi_effective_matrix(taps, K) @ x.reshape(-1)
        assert np.linalg.norm(via_time - via_eff) / np.linalg.norm(via_eff) < 1e-9


def test_isi_problem_matches_dense():
    rng = np.random.default_rng(12)
    nt = nr = 2
    K, L = 8, 3
    taps = gen_isi_taps(nt, nr, L, rng)
    r = rng.standard_normal(K * nr) + 1j * rng.standard_normal(K * nr)
    a = build_alphabet(4)
    p = isi_problem(taps, K, r, a, 0.1)
    Ht, yt = realify(isi_effective_matrix(taps, K), r)
    assert np.abs(p.R - Ht.T @ Ht).max() < 1e-10
    assert np.abs(p.y_mf - Ht.T @ yt).max() < 1e-10
    assert p.ynorm2 == pytest.approx(yt @ yt)


def test_isi_large_frame_dimensions():
    taps = gen_isi_taps(4, 4, 1, np.random.default_rng(13))
    r = np.zeros(512 * 4, dtype=complex)
    p = isi_problem(taps, 512, r, build_alphabet(4), 0.1)
    assert p.d_t == 4096  # 2 * N_t * K


def test_isi_k_less_than_l():
    taps = gen_isi_taps(2, 2, 4, np.random.default_rng(14))
    with pytest.raises(ValueError):
        isi_tone_matrices(taps, 2)
    with pytest.raises(ValueError):
        ChannelScenario(kind="isi", N_t=2, N_r=2, M_complex=4, L=4, K=2)


def test_isi_noise_var():
    n0 = isi_noise_var(1, 1, 4, 2.0, 3.0)
    assert n0 == pytest.approx(2.0 / (2.0 * 10**0.3), rel=1e-12)
    assert isi_noise_var(2, 6, 4, 2.0, 5.0) == pytest.approx(
        2 * isi_noise_var(2, 3, 4, 2.0, 5.0))
