"""Polar encoder, code construction and successive-cancellation decoding.

Index conventions: ``PolarCodeSpec.active`` holds 1-based bit-channel
indices, matching ``polarize``.  Bit arrays are plain numpy ``uint8`` vectors
(or ``(batch, N)`` arrays where noted).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channel import Channel, _require_binary, bhattacharyya
from .polarize import BecProfile, ZProfile, bec_polarize, z_bound_recursion

MAX_MATRIX_LEVEL = 10


class DecodingConflict(ValueError):
    """A frozen bit has zero likelihood although every earlier decision was certain."""


def _level_of(length: int) -> int:
    n = int(length).bit_length() - 1
    if length < 1 or (1 << n) != length:
        raise ValueError(f"length must be a power of 2, got {length}")
    return n


def polar_transform(u) -> np.ndarray:
    """``x = u F_N`` over GF(2) with an O(N log N) butterfly.

    Accepts a bit vector or a ``(batch, N)`` array.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    _level_of(N)
    lead = x.shape[:-1]
    h = 1
    while h < N:
        view = x.reshape(lead + (N // (2 * h), 2, h))
        view[..., 0, :] ^= view[..., 1, :]
        h *= 2
    return x


def transform_matrix(n: int) -> np.ndarray:
    """``F_N`` as the ``n``-th Kronecker power of ``[[1, 0], [1, 1]]``."""
    if not 0 <= n <= MAX_MATRIX_LEVEL:
        raise ValueError(f"level must be in 0..{MAX_MATRIX_LEVEL}, got {n}")
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    F = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        F = np.kron(F, kernel)
    return F


@dataclass(frozen=True, eq=False)
class PolarCodeSpec:
    n: int
    active: tuple[int, ...]
    frozen_pattern: tuple[int, ...]
    scores: tuple[float, ...] | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        N = 1 << self.n
        active = tuple(sorted(int(i) for i in self.active))
        if len(set(active)) != len(active) or any(not 1 <= i <= N for i in active):
            raise ValueError(f"active indices must be distinct values in 1..{N}")
        pattern = tuple(int(b) for b in self.frozen_pattern)
        if len(pattern) != N - len(active) or any(b not in (0, 1) for b in pattern):
            raise ValueError(f"frozen pattern must hold {N - len(active)} bits")
        object.__setattr__(self, "active", active)
        object.__setattr__(self, "frozen_pattern", pattern)
        if self.scores is not None:
            scores = tuple(float(s) for s in self.scores)
            if len(scores) != N or any(not 0.0 <= s <= 1.0 for s in scores):
                raise ValueError(f"scores must be {N} values in [0, 1]")
            object.__setattr__(self, "scores", scores)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return len(self.active)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def frozen(self) -> tuple[int, ...]:
        act = set(self.active)
        return tuple(i for i in range(1, self.N + 1) if i not in act)

    @property
    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[np.asarray(self.active, dtype=int) - 1] = True
        return mask

    def frozen_bits(self) -> np.ndarray:
        """Length-N vector holding the frozen pattern on frozen positions, 0 elsewhere."""
        u = np.zeros(self.N, dtype=np.uint8)
        u[~self.active_mask] = self.frozen_pattern
        return u

    def with_frozen_pattern(self, pattern) -> "PolarCodeSpec":
        return PolarCodeSpec(self.n, self.active, tuple(pattern), self.scores, dict(self.metadata))

    def to_dict(self) -> dict:
        d = {"n": self.n, "active": list(self.active),
             "frozen_pattern": list(self.frozen_pattern),
             "scores": list(self.scores) if self.scores is not None else None}
        if self.metadata:
            d["metadata"] = self.metadata
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "PolarCodeSpec":
        return cls(int(data["n"]), tuple(data["active"]), tuple(data["frozen_pattern"]),
                   None if data.get("scores") is None else tuple(data["scores"]),
                   dict(data.get("metadata", {})))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PolarCodeSpec":
        return cls.from_dict(json.loads(text))


def construct(scores, K: int, frozen_pattern=None, *, score_kind: str | None = None) -> PolarCodeSpec:
    """Pick the ``K`` indices with the smallest scores as the active set.

    Ties go to the larger index.  ``frozen_pattern`` defaults to all zeros.
    """
    if isinstance(scores, BecProfile):
        values, score_kind = scores.eps, score_kind or "bec-exact"
    elif isinstance(scores, ZProfile):
        values, score_kind = scores.z, score_kind or "z-bound"
    else:
        values = np.asarray(scores, dtype=float)
    N = values.size
    n = _level_of(N)
    if not 0 <= K <= N:
        raise ValueError(f"K must lie in 0..{N}, got {K}")
    idx = np.arange(1, N + 1)
    order = np.lexsort((-idx, values))
    active = tuple(sorted(int(i) for i in idx[order[:K]]))
    if frozen_pattern is None:
        frozen_pattern = (0,) * (N - K)
    meta = {"score_kind": score_kind} if score_kind else {}
    if score_kind == "z-bound":
        meta["note"] = "scores are Bhattacharyya upper bounds; the error bound is conservative"
    return PolarCodeSpec(n, active, tuple(frozen_pattern), tuple(values.tolist()), meta)


def encode(code: PolarCodeSpec, data) -> np.ndarray:
    """Place ``data`` on the active set, the frozen pattern elsewhere, and transform.

    ``data`` may be a length-K vector or a ``(batch, K)`` array.
    """
    d = np.asarray(data, dtype=np.uint8)
    if d.shape[-1] != code.K:
        raise ValueError(f"expected {code.K} data bits, got {d.shape[-1]}")
    u = np.broadcast_to(code.frozen_bits(), d.shape[:-1] + (code.N,)).copy()
    u[..., code.active_mask] = d
    return polar_transform(u)


@dataclass(frozen=True, eq=False)
class ReceivedBlock:
    """Channel observations for one block as pairs ``(W(y|0), W(y|1))`` per position."""

    likelihoods: np.ndarray

    def __post_init__(self):
        lk = np.array(self.likelihoods, dtype=float)
        if lk.ndim != 2 or lk.shape[1] != 2:
            raise ValueError("likelihoods must have shape (N, 2)")
        if not np.all(np.isfinite(lk)) or lk.min() < 0:
            raise ValueError("likelihoods must be finite and nonnegative")
        if np.any((lk[:, 0] == 0) & (lk[:, 1] == 0)):
            raise ValueError("a position has zero likelihood under both inputs")
        _level_of(lk.shape[0])
        lk.setflags(write=False)
        object.__setattr__(self, "likelihoods", lk)

    @classmethod
    def from_symbols(cls, y, W: Channel) -> "ReceivedBlock":
        _require_binary(W)
        y = np.asarray(y)
        if y.ndim != 1 or not np.issubdtype(y.dtype, np.integer):
            raise ValueError("symbols must be a 1-D integer vector")
        if y.size and (y.min() < 0 or y.max() >= W.output_size):
            raise ValueError(f"symbol index outside 0..{W.output_size - 1}")
        return cls(W.transitions[:, y].T)

    def __len__(self):
        return self.likelihoods.shape[0]

    def llr(self) -> np.ndarray:
        lk = self.likelihoods
        with np.errstate(divide="ignore"):
            return np.log(lk[:, 0]) - np.log(lk[:, 1])


def channel_llr(W: Channel) -> np.ndarray:
    """Per-output log-likelihood ratio ``ln W(y|0) - ln W(y|1)``; NaN for impossible outputs."""
    _require_binary(W)
    t = W.transitions
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(t[0]) - np.log(t[1])


def _boxplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # exact LLR of the XOR of two independent bits
    with np.errstate(invalid="ignore"):
        hard = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        corr = np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    return hard + np.where(np.isnan(corr), 0.0, corr)


class _SCState:
    def __init__(self, frozen_mask, frozen_values, batch, strict):
        self.frozen_mask = frozen_mask
        self.frozen_values = frozen_values
        self.u = np.zeros((batch, frozen_mask.size), dtype=np.uint8)
        self.uncertain = np.zeros(batch, dtype=bool)
        self.strict = strict


def _sc(llr: np.ndarray, lo: int, st: _SCState) -> np.ndarray:
    """Decode ``u[lo : lo + len]`` from channel LLRs of ``x``; returns the re-encoded ``x``."""
    size = llr.shape[1]
    if size > 1 and not st.strict and st.frozen_mask[lo:lo + size].all():
        bits = np.broadcast_to(st.frozen_values[lo:lo + size], (llr.shape[0], size))
        st.u[:, lo:lo + size] = bits
        return polar_transform(bits)
    if size == 1:
        l = llr[:, 0]
        if st.frozen_mask[lo]:
            bit = np.full(l.shape, st.frozen_values[lo], dtype=np.uint8)
            if st.strict:
                _check_frozen(l, bit, lo, st)
        else:
            # L > 1 -> 0, otherwise 1 (ties and NaN decide 1)
            bit = np.where(l > 0, 0, 1).astype(np.uint8)
            st.uncertain |= ~np.isinf(l)
        st.u[:, lo] = bit
        return bit[:, None]
    half = size // 2
    top, bottom = llr[:, :half], llr[:, half:]
    a = _sc(_boxplus(top, bottom), lo, st)
    with np.errstate(invalid="ignore"):
        b = _sc(bottom + np.where(a == 1, -top, top), lo + half, st)
    return np.concatenate([a ^ b, b], axis=1)


def _check_frozen(l, bit, lo, st):
    impossible = ((bit == 0) & (l == -np.inf)) | ((bit == 1) & (l == np.inf))
    if np.any(impossible & ~st.uncertain):
        raise DecodingConflict(f"frozen bit {lo + 1} has zero likelihood; input is corrupted")


def sc_decode_llr(code: PolarCodeSpec, llr, *, strict: bool = False) -> np.ndarray:
    """Batched SC decoding from channel LLRs of shape ``(N,)`` or ``(batch, N)``.

    Returns the decided ``u`` vectors.  With ``strict`` a frozen position whose
    prescribed value is impossible, while all earlier decisions were certain,
    raises :class:`DecodingConflict`.
    """
    llr = np.asarray(llr, dtype=float)
    single = llr.ndim == 1
    llr2 = llr[None, :] if single else llr
    if llr2.shape[1] != code.N:
        raise ValueError(f"expected {code.N} LLRs per block, got {llr2.shape[1]}")
    fm = ~code.active_mask
    st = _SCState(fm, code.frozen_bits(), llr2.shape[0], strict)
    _sc(llr2, 0, st)
    return st.u[0] if single else st.u


def sc_decode(code: PolarCodeSpec, rx, W: Channel | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Successive-cancellation decoding of one block.

    ``rx`` is a :class:`ReceivedBlock` or a vector of output-symbol indices of
    ``W``.  Returns ``(data_hat, u_hat)``.
    """
    if not isinstance(rx, ReceivedBlock):
        if W is None:
            raise ValueError("symbol indices need the channel to compute likelihoods")
        rx = ReceivedBlock.from_symbols(rx, W)
    if len(rx) != code.N:
        raise ValueError(f"received block has length {len(rx)}, code length is {code.N}")
    u_hat = sc_decode_llr(code, rx.llr(), strict=True)
    return u_hat[code.active_mask], u_hat


def fer_union_bound(code: PolarCodeSpec) -> tuple[float, float]:
    """Sum of active-set scores: ``(clipped to [0, 1], raw)``."""
    if code.scores is None:
        raise ValueError("code carries no scores")
    scores = np.asarray(code.scores)
    raw = float(np.sum(scores[code.active_mask])) if code.K else 0.0
    return min(raw, 1.0), raw


def is_erasure_like(W: Channel, tol: float = 1e-12) -> bool:
    """True when every output either identifies the input or is equally likely under both."""
    _require_binary(W)
    t = W.transitions
    identifying = (t[0] <= tol) | (t[1] <= tol)
    return bool(np.all(identifying | (np.abs(t[0] - t[1]) <= tol)))


def design(W: Channel, n: int, K: int, frozen_pattern=None) -> PolarCodeSpec:
    """Construct a code for ``W``: exact erasure recursion for BEC-like channels,
    Bhattacharyya bound recursion otherwise."""
    z = bhattacharyya(W)
    profile = bec_polarize(z, n) if is_erasure_like(W) else z_bound_recursion(z, n)
    return construct(profile, K, frozen_pattern)
