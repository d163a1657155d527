"""PAM constellations for the real-valued search space.

After the complex model is rewritten in real form, every coordinate of the
solution vector lives on a sqrt(M)-PAM axis. This module holds those
per-coordinate alphabets, the nearest-symbol neighbor tables driving the
local search, hard quantization, and the Gray bit labeling used for BER
accounting.
"""

from dataclasses import dataclass, field

import numpy as np

_SUPPORTED_QAM = (4, 16, 64)


@dataclass(frozen=True)
class Alphabet:
    """Odd-integer PAM levels with reflected-Gray bit labels.

    ``levels`` are strictly increasing, symmetric about zero and spaced
    by 2 (e.g. -3,-1,1,3). ``labels[q]`` is the Gray codeword (MSB first)
    of level index q.
    """

    levels: np.ndarray
    labels: np.ndarray

    @property
    def M_real(self) -> int:
        return len(self.levels)

    @property
    def bits_per_level(self) -> int:
        return self.labels.shape[1]

    @property
    def symbol_energy(self) -> float:
        """Average energy per complex symbol: two PAM axes."""
        return 2.0 * float(np.mean(self.levels**2))


@dataclass(frozen=True)
class NeighborTable:
    """Per-symbol nearest-neighbor lists, ordered by ascending distance.

    ``table[q]`` holds the level indices of the N nearest levels to level q
    (never q itself); distance ties break toward the smaller level.
    ``reverse[q_new, q_old]`` gives v such that ``table[q_new][v] == q_old``,
    or -1 when q_old is not in q_new's list.
    """

    N: int
    table: np.ndarray
    reverse: np.ndarray = field(repr=False, default=None)


def build_alphabet(M_complex: int) -> Alphabet:
    """PAM alphabet used per real coordinate of an M-QAM system."""
    if M_complex not in _SUPPORTED_QAM:
        raise ValueError(f"unsupported QAM order {M_complex}; expected one of {_SUPPORTED_QAM}")
    m = int(round(np.sqrt(M_complex)))
    levels = np.arange(-(m - 1), m, 2, dtype=np.float64)
    nbits = int(np.log2(m))
    labels = np.zeros((m, nbits), dtype=np.int8)
    for q in range(m):
        g = q ^ (q >> 1)
        for b in range(nbits):
            labels[q, b] = (g >> (nbits - 1 - b)) & 1
    return Alphabet(levels=levels, labels=labels)


def build_neighbor_table(alphabet: Alphabet, N: int) -> NeighborTable:
    """N nearest levels per symbol, ascending distance, ties toward smaller level."""
    M = alphabet.M_real
    if not 1 <= N <= M - 1:
        raise ValueError(f"N must be in [1, {M - 1}], got {N}")
    lv = alphabet.levels
    table = np.empty((M, N), dtype=np.int64)
    for q in range(M):
        cand = [p for p in range(M) if p != q]
        cand.sort(key=lambda p: (abs(lv[p] - lv[q]), lv[p]))
        table[q] = cand[:N]
    reverse = np.full((M, M), -1, dtype=np.int64)
    for q in range(M):
        for v in range(N):
            reverse[q, table[q, v]] = v
    return NeighborTable(N=N, table=table, reverse=reverse)


def quantize(alphabet: Alphabet, v) -> np.ndarray:
    """Nearest level index; exact midpoints round toward the smaller level."""
    t = (np.asarray(v, dtype=np.float64) - alphabet.levels[0]) / 2.0
    idx = np.ceil(t - 0.5).astype(np.int64)
    return np.clip(idx, 0, alphabet.M_real - 1)


def bits_to_vector(alphabet: Alphabet, bits) -> np.ndarray:
    """Gray-labeled bits (MSB first per coordinate) -> level indices."""
    bits = np.asarray(bits, dtype=np.int64)
    k = alphabet.bits_per_level
    if bits.size % k:
        raise ValueError(f"bit count {bits.size} not divisible by {k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    gray = bits.reshape(-1, k) @ weights
    # inverse reflected-Gray: prefix XOR
    q = gray.copy()
    shift = 1
    while shift < k:
        q ^= q >> shift
        shift *= 2
    return q


def vector_to_bits(alphabet: Alphabet, idx) -> np.ndarray:
    """Level indices -> Gray-labeled bit string."""
    idx = np.asarray(idx, dtype=np.int64)
    return alphabet.labels[idx].reshape(-1).astype(np.int64)
