"""Channel scenarios and their reduction to one real-valued detection problem.

Three systems are supported: flat-fading spatial multiplexing (V-BLAST),
full-rate non-orthogonal space-time block codes built from cyclic division
algebras, and frequency-selective MIMO links with a cyclic prefix. Each is
reduced to the canonical real model y = Hx + n with x on a PAM lattice,
carrying the precomputed Gram matrix R = H^T H and matched-filter output
y_MF = H^T y that the search detectors consume.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alphabet import Alphabet


@dataclass(frozen=True)
class RealProblem:
    """One real-valued detection instance.

    ``H`` and ``y`` may be None for very large instances where only the
    Gram-domain quantities are materialized; the detectors only need
    ``R``, ``y_mf`` and ``ynorm2``.
    """

    R: np.ndarray
    y_mf: np.ndarray
    ynorm2: float
    alphabet: Alphabet
    noise_var_per_real_dim: float
    H: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None

    @property
    def d_t(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True)
class ChannelScenario:
    kind: str  # "vblast" | "stbc" | "isi"
    N_t: int
    N_r: int
    M_complex: int
    L: int = 1
    K: int = 1
    stbc_delta: complex = 1.0
    stbc_t: complex = 1.0

    def __post_init__(self):
        if self.kind not in ("vblast", "stbc", "isi"):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.kind == "isi" and self.K < self.L:
            raise ValueError(f"frame length K={self.K} must be >= L={self.L}")


def realify(H: np.ndarray, y: np.ndarray):
    """Complex model -> stacked real model.

    H_tilde = [[Re H, -Im H], [Im H, Re H]], y_tilde = [Re y; Im y], so that
    x_tilde = [Re x; Im x] satisfies H_tilde x_tilde = realified(H x).
    """
    H = np.asarray(H)
    y = np.asarray(y)
    if H.shape[0] != y.shape[0]:
        raise ValueError(f"dimension mismatch: H is {H.shape}, y has {y.shape[0]} rows")
    Ht = np.block([[H.real, -H.imag], [H.imag, H.real]])
    yt = np.concatenate([y.real, y.imag])
    return Ht, yt


def make_problem(H: np.ndarray, y: np.ndarray, alphabet: Alphabet, noise_var: float) -> RealProblem:
    """Realify a complex model and precompute R and y_MF.

    ``noise_var`` is the variance of one complex noise entry; each real
    dimension carries half of it.
    """
    Ht, yt = realify(H, y)
    return RealProblem(
        R=Ht.T @ Ht,
        y_mf=Ht.T @ yt,
        ynorm2=float(yt @ yt),
        alphabet=alphabet,
        noise_var_per_real_dim=noise_var / 2.0,
        H=Ht,
        y=yt,
    )


def gen_vblast(N_t: int, N_r: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. CN(0,1) flat-fading channel matrix."""
    return (rng.standard_normal((N_r, N_t)) + 1j * rng.standard_normal((N_r, N_t))) / np.sqrt(2.0)


def gen_noise(shape, var: float, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian noise, ``var`` per complex entry."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def noise_var_vblast(N_t: int, E_s: float, snr_db: float) -> float:
    """sigma^2 = N_t E_s / gamma, gamma the average received SNR per rx antenna."""
    return N_t * E_s / 10.0 ** (snr_db / 10.0)


# ---------------------------------------------------------------------------
# Non-orthogonal STBC from cyclic division algebras


def stbc_encode(data: np.ndarray, N_t: int, delta: complex = 1.0, t: complex = 1.0) -> np.ndarray:
    """Layered CDA codeword from N_t^2 data symbols.

    Entry (k, c) is delta^(c>k) * sum_i data[l, i] * omega^(c*i) * t^i with
    omega = exp(2j*pi/N_t) and layer l = (k - c) mod N_t; column c is the
    vector transmitted at channel use c.
    """
    data = np.asarray(data).reshape(-1)
    if data.size != N_t * N_t:
        raise ValueError(f"expected {N_t * N_t} data symbols, got {data.size}")
    x = data.reshape(N_t, N_t)  # x[layer, i]
    omega = np.exp(2j * np.pi / N_t)
    S = np.zeros((N_t, N_t), dtype=np.complex128)
    ti = t ** np.arange(N_t)
    for k in range(N_t):
        for c in range(N_t):
            l = (k - c) % N_t
            tw = delta if c > k else 1.0
            S[k, c] = tw * np.sum(x[l] * omega ** (c * np.arange(N_t)) * ti)
    return S


def stbc_effective_matrix(H: np.ndarray, delta: complex = 1.0, t: complex = 1.0) -> np.ndarray:
    """Complex linear map data -> stacked received vectors over N_t uses.

    Column (l*N_t + i) of the result holds, for each channel use c, the
    contribution delta^(c>k) omega^(c i) t^i H[:, k] with k = (l + c) mod N_t.
    Realifying this matrix gives the d_r x d_t model with d_t = 2 N_t^2 and
    d_r = 2 N_t N_r.
    """
    N_r, N_t = H.shape
    omega = np.exp(2j * np.pi / N_t)
    A = np.zeros((N_t * N_r, N_t * N_t), dtype=np.complex128)
    for c in range(N_t):
        for l in range(N_t):
            k = (l + c) % N_t
            tw = delta if c > k else 1.0
            for i in range(N_t):
                A[c * N_r:(c + 1) * N_r, l * N_t + i] = tw * omega ** (c * i) * t**i * H[:, k]
    return A


def stbc_problem(H: np.ndarray, y_stacked: np.ndarray, alphabet: Alphabet,
                 noise_var: float, delta: complex = 1.0, t: complex = 1.0) -> RealProblem:
    """Real detection problem for a received STBC frame (columns stacked)."""
    A = stbc_effective_matrix(H, delta, t)
    return make_problem(A, y_stacked, alphabet, noise_var)


# ---------------------------------------------------------------------------
# MIMO-ISI with cyclic prefix


def gen_isi_taps(N_t: int, N_r: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """L i.i.d. CN(0,1) tap matrices (uniform power delay profile), shape (L, N_r, N_t)."""
    if L < 1:
        raise ValueError("need at least one tap")
    return (rng.standard_normal((L, N_r, N_t)) + 1j * rng.standard_normal((L, N_r, N_t))) / np.sqrt(2.0)


def isi_noise_var(N_t: int, L: int, M_complex: int, E_s: float, ebn0_db: float) -> float:
    """N0 from average Eb/N0 per receive antenna.

    Received symbol SNR is N_t*L*E_s/N0 (unit-energy taps, uniform profile)
    and Eb/N0 = SNR / (N_t * log2 M).
    """
    return N_t * L * E_s / (np.log2(M_complex) * 10.0 ** (ebn0_db / 10.0))


def isi_tone_matrices(taps: np.ndarray, K: int) -> np.ndarray:
    """Per-tone channel G_i = sum_l exp(-2j*pi*l*i/K) H_l, shape (K, N_r, N_t)."""
    L = taps.shape[0]
    if K < L:
        raise ValueError(f"frame length K={K} must be >= L={L}")
    i = np.arange(K)[:, None]
    l = np.arange(L)[None, :]
    ph = np.exp(-2j * np.pi * l * i / K)  # (K, L)
    return np.einsum("kl,lrt->krt", ph, taps)


def isi_effective_matrix(taps: np.ndarray, K: int) -> np.ndarray:
    """Dense H_eff = G F with G = blockdiag(G_i) and F = (1/sqrt(K)) D_K (x) I_Nt.

    Only meant for small K; large frames should go through isi_problem, which
    exploits the block-circulant Gram structure.
    """
    G = isi_tone_matrices(taps, K)
    _, N_r, N_t = G.shape
    DK = np.exp(-2j * np.pi * np.outer(np.arange(K), np.arange(K)) / K)
    F = np.kron(DK, np.eye(N_t)) / np.sqrt(K)
    Gbd = np.zeros((K * N_r, K * N_t), dtype=np.complex128)
    for i in range(K):
        Gbd[i * N_r:(i + 1) * N_r, i * N_t:(i + 1) * N_t] = G[i]
    return Gbd @ F


def isi_time_to_freq(y_time: np.ndarray, K: int) -> np.ndarray:
    """Stack per-tone DFTs r_i = (1/sqrt(K)) sum_q exp(-2j*pi*q*i/K) y_q.

    ``y_time`` has shape (K, N_r); the result stacks r_0..r_{K-1}.
    """
    r = np.fft.fft(y_time, axis=0) / np.sqrt(K)
    return r.reshape(-1)


def isi_transmit_time(x_time: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Noise-free received frame via cyclic-prefix transmission.

    ``x_time`` has shape (K, N_t). The last L-1 symbols are prepended as CP,
    the frame is linearly convolved with the taps, and the prefix samples
    are discarded, leaving the circular convolution the CP induces.
    """
    L = taps.shape[0]
    K = x_time.shape[0]
    ext = np.vstack([x_time[K - (L - 1):], x_time]) if L > 1 else x_time
    y = np.zeros((K, taps.shape[1]), dtype=np.complex128)
    for q in range(K):
        for l in range(L):
            y[q] += taps[l] @ ext[q + (L - 1) - l]
    return y


def isi_problem(taps: np.ndarray, K: int, r: np.ndarray, alphabet: Alphabet,
                N0: float) -> RealProblem:
    """Real detection problem for one CP frame from the stacked tone observation r.

    R and y_MF are assembled from the block-circulant structure of
    H_eff^H H_eff = F^H (G^H G) F, avoiding the dense K N_r x K N_t effective
    matrix; exact, not an approximation.
    """
    G = isi_tone_matrices(taps, K)
    _, N_r, N_t = G.shape
    B = np.einsum("irt,irs->its", np.conj(G), G)  # per-tone G_i^H G_i, (K, N_t, N_t)
    C = np.fft.ifft(B, axis=0)  # C[d] = (1/K) sum_i B_i exp(2j pi d i / K)
    didx = (np.arange(K)[:, None] - np.arange(K)[None, :]) % K
    Rc = C[didx].transpose(0, 2, 1, 3).reshape(K * N_t, K * N_t)
    rk = r.reshape(K, N_r)
    gh_r = np.einsum("irt,ir->it", np.conj(G), rk)  # per-tone G_i^H r_i
    y_mf_c = (np.fft.ifft(gh_r, axis=0) * K / np.sqrt(K)).reshape(-1)
    R = np.block([[Rc.real, -Rc.imag], [Rc.imag, Rc.real]])
    y_mf = np.concatenate([y_mf_c.real, y_mf_c.imag])
    return RealProblem(
        R=R,
        y_mf=y_mf,
        ynorm2=float(np.real(np.vdot(r, r))),
        alphabet=alphabet,
        noise_var_per_real_dim=N0 / 2.0,
    )
