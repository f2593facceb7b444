"""Exhaustive small-instance oracles for ML decoding, random-coding ensembles and
the Massey and Pinsker cutoff-rate boosting schemes.

Messages are 0-based row indices into ``BlockCode.codewords``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, NamedTuple

import numpy as np

from .channel import Channel, _probs, bec, capacity, cutoff_rate, qec

MAX_OUTPUTS = 2 ** 22
LIKELIHOOD_RTOL = 1e-12


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BlockCode:
    """A list of ``M`` codewords of length ``N`` over the channel input alphabet."""

    codewords: np.ndarray
    generator: np.ndarray | None = None

    def __post_init__(self):
        cw = np.array(self.codewords, dtype=np.int64)
        if cw.ndim != 2 or cw.shape[0] < 1 or cw.shape[1] < 1:
            raise ValueError("codewords must be a nonempty (M, N) array")
        if cw.min() < 0:
            raise ValueError("codeword symbols must be nonnegative")
        cw.setflags(write=False)
        object.__setattr__(self, "codewords", cw)

    @classmethod
    def from_generator(cls, G) -> "BlockCode":
        """Linear code spanned by the rows of ``G`` over GF(2).

        Message ``m`` carries the data bits of ``m`` written most-significant
        first, so message 0 is the all-zero codeword.
        """
        G = np.array(G, dtype=np.int64) % 2
        if G.ndim != 2:
            raise ValueError("generator must be a matrix")
        k = G.shape[0]
        data = _bits(np.arange(2 ** k), k)
        return cls(data @ G % 2, G)

    @property
    def M(self) -> int:
        return self.codewords.shape[0]

    @property
    def N(self) -> int:
        return self.codewords.shape[1]

    @property
    def rate(self) -> float:
        return math.log2(self.M) / self.N


def _bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return (np.asarray(values)[:, None] >> shifts) & 1


def gf2_rank(G) -> int:
    A = np.array(G, dtype=np.uint8) % 2
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if A[r, c]), None)
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= A[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _check_outputs(W: Channel, N: int, extra: int = 1):
    if W.output_size ** N * extra > MAX_OUTPUTS:
        raise EnumerationTooLarge(
            f"enumeration over {W.output_size}^{N} outputs exceeds the {MAX_OUTPUTS} guard")


def sequence_likelihoods(codewords: np.ndarray, W: Channel) -> np.ndarray:
    """``W^N(y^N | x^N(m))`` for every codeword (rows) and every output sequence (columns).

    Output sequences are enumerated in lexicographic order, first symbol most
    significant.
    """
    cw = np.asarray(codewords)
    if cw.max() >= W.input_size:
        raise ValueError("codeword symbol outside the channel input alphabet")
    _check_outputs(W, cw.shape[1], cw.shape[0])
    t = W.transitions
    return np.stack([reduce(np.multiply.outer, [t[x] for x in row]).ravel() for row in cw])


def _at_least(a: np.ndarray, b) -> np.ndarray:
    # a >= b, counting products that differ only by rounding as ties
    return a >= b * (1.0 - LIKELIHOOD_RTOL)


def pairwise_error_exact(code: BlockCode, W: Channel, m: int, m_prime: int) -> float:
    """Probability that ``m_prime`` looks at least as likely as the sent ``m``."""
    if m == m_prime:
        raise ValueError("messages must differ")
    for k in (m, m_prime):
        if not 0 <= k < code.M:
            raise ValueError(f"message index {k} outside 0..{code.M - 1}")
    L = sequence_likelihoods(code.codewords[[m, m_prime]], W)
    return float(np.sum(L[0], where=_at_least(L[1], L[0])))


def bhattacharyya_product(code: BlockCode, W: Channel, m: int, m_prime: int) -> float:
    """Product over positions of ``sum_y sqrt(W(y|x_n(m)) W(y|x_n(m')))``."""
    s = np.sqrt(W.transitions)
    a, b = code.codewords[m], code.codewords[m_prime]
    return float(np.prod([s[x] @ s[xp] for x, xp in zip(a, b)]))


class PairwiseAverage(NamedTuple):
    average: float
    bhattacharyya_average: float
    single_letter: float
    bound: float


def ensemble_pairwise_average(N: int, W: Channel, Q=None) -> PairwiseAverage:
    """Exact ensemble average of the pairwise error probability for i.i.d.-``Q`` codewords.

    Also returns the ensemble average of the Bhattacharyya product bound, its
    single-letter form ``[sum_y (sum_x Q(x) sqrt W(y|x))^2]^N`` and the bound
    ``2^{-N R0(Q)}``.
    """
    q = _probs(W, Q)
    X = W.input_size
    if X ** (2 * N) * W.output_size ** N > MAX_OUTPUTS * 64:
        raise EnumerationTooLarge("codeword-pair enumeration too large")
    words = np.array(np.unravel_index(np.arange(X ** N), (X,) * N)).T if N else np.zeros((1, 0), int)
    weights = np.prod(q[words], axis=1)
    L = sequence_likelihoods(words, W)
    S = np.sqrt(W.transitions) @ np.sqrt(W.transitions).T
    avg = 0.0
    bavg = 0.0
    for i in range(len(words)):
        if weights[i] == 0:
            continue
        p = np.sum(L[i] * _at_least(L, L[i]), axis=1)
        avg += weights[i] * float(weights @ p)
        prod = np.prod(S[words[i][None, :], words], axis=1)
        bavg += weights[i] * float(weights @ prod)
    single = float(np.sum((q @ np.sqrt(W.transitions)) ** 2) ** N)
    bound = 2.0 ** (-N * cutoff_rate(W, q))
    if avg > bound * (1 + 1e-9):
        raise ArithmeticError(f"pairwise average {avg} exceeds the cutoff-rate bound {bound}")
    return PairwiseAverage(float(avg), float(bavg), single, bound)


class Guesswork(NamedTuple):
    expected: float
    pairwise_sum: float


def guesswork_exact(code: BlockCode, W: Channel, tie_break: str = "lower") -> Guesswork:
    """Average number of wrong guesses of an ML-ordered guessing decoder.

    Messages with equal likelihood are guessed in increasing index order
    (``tie_break="lower"``) or decreasing order (``"higher"``).  The pairwise
    sum counts ties as errors, so ``expected <= pairwise_sum``.
    """
    if tie_break not in ("lower", "higher"):
        raise ValueError("tie_break must be 'lower' or 'higher'")
    L = sequence_likelihoods(code.codewords, W)
    M = code.M
    idx = np.arange(M)
    expected = 0.0
    pairwise = 0.0
    for m in range(M):
        ahead = L > L[m] * (1.0 + LIKELIHOOD_RTOL)
        tie = _at_least(L, L[m]) & ~ahead
        earlier = idx < m if tie_break == "lower" else idx > m
        rank = ahead.sum(axis=0) + (tie & earlier[:, None]).sum(axis=0)
        expected += float(L[m] @ rank)
        others = _at_least(L, L[m])
        others[m] = False
        pairwise += float(L[m] @ others.sum(axis=0))
    expected /= M
    pairwise /= M
    if expected > pairwise * (1 + 1e-12) + 1e-15:
        raise ArithmeticError("guesswork exceeds the pairwise sum")
    return Guesswork(expected, pairwise)


class GuessworkEnsemble(NamedTuple):
    mean: float
    stderr: float
    bound: float
    samples: int


def guesswork_ensemble(N: int, M: int, W: Channel, Q=None, samples: int = 200,
                       seed: int = 0) -> GuessworkEnsemble:
    """Sample mean of ``E[G0]`` over random i.i.d.-``Q`` codes with the bound ``2^{N(R - R0)}``."""
    q = _probs(W, Q)
    rng = np.random.default_rng(seed)
    vals = np.array([
        guesswork_exact(BlockCode(rng.choice(W.input_size, size=(M, N), p=q)), W).expected
        for _ in range(samples)])
    R = math.log2(M) / N
    bound = 2.0 ** (N * (R - cutoff_rate(W, q)))
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    return GuessworkEnsemble(float(vals.mean()), stderr, bound, samples)


@dataclass(frozen=True)
class SchemeReport:
    """Named scalar results with the formula each one came from."""

    name: str
    values: dict[str, Any]
    formulas: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def to_dict(self) -> dict:
        return {"scheme": self.name, "values": self.values, "formulas": self.formulas}


def massey_split(eps: float, tol: float = 1e-10) -> SchemeReport:
    """Capacity and cutoff rate of a QEC with and without splitting into two BECs."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    c_qec = 2.0 * (1.0 - eps)
    r0_qec = math.log2(4.0 / (1.0 + 3.0 * eps))
    c_split = 2.0 * (1.0 - eps)
    r0_split = 2.0 * math.log2(2.0 / (1.0 + eps))
    numeric = {
        "capacity_qec": capacity(qec(eps)),
        "cutoff_qec": cutoff_rate(qec(eps)),
        "capacity_split": 2.0 * capacity(bec(eps)),
        "cutoff_split": 2.0 * cutoff_rate(bec(eps)),
    }
    closed = {"capacity_qec": c_qec, "cutoff_qec": r0_qec,
              "capacity_split": c_split, "cutoff_split": r0_split}
    for key, v in closed.items():
        if abs(v - numeric[key]) > tol:
            raise ArithmeticError(f"{key}: closed form {v} disagrees with numeric {numeric[key]}")
    values = dict(closed)
    values["cutoff_gain"] = r0_split - r0_qec
    values["numeric"] = numeric
    return SchemeReport("massey", values, {
        "capacity_qec": "2(1-eps)",
        "cutoff_qec": "log2(4/(1+3eps))",
        "capacity_split": "2 C_BEC = 2(1-eps)",
        "cutoff_split": "2 log2(2/(1+eps))",
        "cutoff_gain": "cutoff_split - cutoff_qec",
    })


def bsc_cutoff(p) -> np.ndarray:
    """Symmetric cutoff rate of a BSC: ``1 - log2(1 + 2 sqrt(p (1 - p)))``."""
    p = np.asarray(p, dtype=float)
    return 1.0 - np.log2(1.0 + 2.0 * np.sqrt(p * (1.0 - p)))


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    count = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        count += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return count


def pinsker_analysis(G, p: float) -> SchemeReport:
    """Inner-code analysis of Pinsker's scheme for a linear code on a BSC.

    Every output of the all-zero codeword is ML-decoded exhaustively (ties to
    the lower codeword index), giving the frame error ``p_e``, the per-bit
    error rates ``p_i`` and the cutoff rates the outer decoders would see.
    """
    G = np.array(G, dtype=np.int64) % 2
    if G.ndim != 2:
        raise ValueError("generator must be a matrix")
    K2, N2 = G.shape
    if K2 > 10 or N2 > 14:
        raise EnumerationTooLarge(f"need K2 <= 10 and N2 <= 14, got ({K2}, {N2})")
    if gf2_rank(G) != K2:
        raise ValueError("generator matrix is rank deficient over GF(2)")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover probability must lie in [0, 1], got {p}")
    code = BlockCode.from_generator(G)
    weights = 1 << np.arange(N2 - 1, -1, -1)
    cw_int = code.codewords @ weights
    y = np.arange(2 ** N2)
    dist = _popcount(y[:, None] ^ cw_int[None, :])
    if p < 0.5:
        decided = np.argmin(dist, axis=1)
    elif p > 0.5:
        decided = np.argmax(dist, axis=1)
    else:
        decided = np.zeros(y.size, dtype=np.int64)
    w = _popcount(y)
    prob = np.power(p, w) * np.power(1.0 - p, N2 - w)
    data_hat = _bits(decided, K2)
    p_e = float(prob[decided != 0].sum())
    p_i = [float(prob[data_hat[:, i] == 1].sum()) for i in range(K2)]
    r0_i = [float(v) for v in bsc_cutoff(p_i)]
    r0_e = float(bsc_cutoff(p_e))
    R2 = K2 / N2
    values = {
        "K2": K2, "N2": N2, "p": p,
        "capacity": 1.0 - float(-p * math.log2(p) - (1 - p) * math.log2(1 - p)) if 0 < p < 1 else 1.0,
        "frame_error": p_e,
        "bit_errors": p_i,
        "bit_cutoff_rates": r0_i,
        "frame_cutoff_rate": r0_e,
        "aggregate_cutoff": float(sum(r0_i)),
        "normalized_cutoff": R2 * r0_e,
        "uniformly_good": all(r >= r0_e - 1e-15 for r in r0_i),
    }
    return SchemeReport("pinsker", values, {
        "capacity": "1 + p log2 p + (1-p) log2(1-p)",
        "bit_cutoff_rates": "1 - log2(1 + 2 sqrt(p_i (1 - p_i)))",
        "aggregate_cutoff": "sum_i R0(p_i)",
        "normalized_cutoff": "(K2/N2) R0(p_e)",
        "uniformly_good": "R0(p_i) >= R0(p_e) for all i",
    })


class UnionBound(NamedTuple):
    value: float
    vacuous: bool


def union_bound(N: int, R: float, Q, W: Channel) -> UnionBound:
    """Ensemble ML error bound ``2^{-N (R0(Q) - R)}``, flagged vacuous when ``>= 1``."""
    if R < 0:
        raise ValueError("rate must be nonnegative")
    value = 2.0 ** (-N * (cutoff_rate(W, Q) - R))
    return UnionBound(value, value >= 1.0)


def read_bit_rows(text: str) -> np.ndarray:
    """Parse text rows of 0/1 (whitespace optional, ``#`` comments allowed) into a matrix."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        bits = [c for c in line if not c.isspace() and c != ","]
        if any(b not in "01" for b in bits):
            raise ValueError(f"row {line!r} is not a 0/1 string")
        rows.append([int(b) for b in bits])
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("expected a nonempty block of equal-length 0/1 rows")
    return np.array(rows, dtype=np.int64)
