"""Channel combining and splitting with the size-2 kernel.

Bit-channel indices are 1-based and follow the natural SC order: index ``i``
at level ``n`` has branch string given by the ``n``-bit binary expansion of
``i - 1`` read most-significant first, with ``0 -> '-'`` and ``1 -> '+'``.
Hence ``W_{2N}^{(2i-1)} = (W_N^{(i)})^-`` and ``W_{2N}^{(2i)} = (W_N^{(i)})^+``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .channel import (Channel, _require_binary, bhattacharyya, cutoff_from_bhattacharyya,
                      symmetric_capacity, symmetric_cutoff_rate)

MAX_LEVEL = 25
MAX_SYNTH_OUTPUTS = 2 ** 22


class AlphabetTooLarge(ValueError):
    """Exact synthesis would exceed the output-alphabet guard."""


@dataclass(frozen=True)
class SynthChannel:
    channel: Channel
    branch: str
    index: int

    @property
    def n(self) -> int:
        return len(self.branch)

    @property
    def symmetric_capacity(self) -> float:
        return symmetric_capacity(self.channel)

    @property
    def bhattacharyya(self) -> float:
        return bhattacharyya(self.channel)

    @property
    def cutoff_rate(self) -> float:
        return symmetric_cutoff_rate(self.channel)


@dataclass(frozen=True, eq=False)
class BecProfile:
    """Erasure probabilities of all bit-channels of a BEC at level ``n``.

    ``complement`` holds ``1 - eps`` computed by its own recursion, so both
    tails keep full relative precision.
    """

    n: int
    eps: np.ndarray
    complement: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.eps

    def __len__(self):
        return self.eps.size


@dataclass(frozen=True, eq=False)
class ZProfile:
    """Upper bounds on the Bhattacharyya parameters of all bit-channels (exact for a BEC)."""

    n: int
    z: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.z

    def __len__(self):
        return self.z.size


class PolarizationStats(NamedTuple):
    good_fraction: float
    bad_fraction: float
    middling_fraction: float


def branch_of(n: int, i: int) -> str:
    if not 1 <= i <= 2 ** n:
        raise ValueError(f"index {i} outside 1..{2 ** n}")
    return "".join("+" if b == "1" else "-" for b in format(i - 1, f"0{n}b")) if n else ""


def index_of(branch: str) -> int:
    if set(branch) - {"-", "+"}:
        raise ValueError(f"branch must use only '-' and '+', got {branch!r}")
    return 1 + sum(1 << k for k, c in enumerate(reversed(branch)) if c == "+")


def polar_pair(W: Channel) -> tuple[Channel, Channel]:
    """Split two copies of ``W`` into ``(W-, W+)``.

    ``W-`` has outputs ``(y1, y2)`` at column ``y1 * |Y| + y2``; ``W+`` has
    outputs ``(y1, y2, u1)`` at column ``(y1 * |Y| + y2) * 2 + u1``.
    """
    _require_binary(W)
    t = W.transitions
    m = t.shape[1]
    # joint[u1, u2, y1, y2] = W(y1 | u1 ^ u2) W(y2 | u2) / 2
    joint = np.empty((2, 2, m, m))
    for u1 in (0, 1):
        for u2 in (0, 1):
            joint[u1, u2] = 0.5 * np.outer(t[u1 ^ u2], t[u2])
    minus = joint.sum(axis=1).reshape(2, m * m)
    plus = np.transpose(joint, (1, 2, 3, 0)).reshape(2, 2 * m * m)
    return Channel(_renormalize(minus)), Channel(_renormalize(plus))


def _renormalize(t: np.ndarray) -> np.ndarray:
    # keeps rows stochastic to the 1e-12 validation tolerance at deep levels
    return t / t.sum(axis=1, keepdims=True)


def merge_equivalent_outputs(W: Channel, decimals: int = 10) -> Channel:
    """Lossless merge of outputs that share the same likelihood ratio.

    Outputs impossible under both inputs are dropped.  Symmetric capacity and
    the Bhattacharyya parameter are unchanged up to rounding of the
    log-likelihood-ratio key (``decimals`` digits).
    """
    _require_binary(W)
    t = W.transitions
    keep = (t[0] > 0) | (t[1] > 0)
    t = t[:, keep]
    with np.errstate(divide="ignore"):
        llr = np.log(t[0]) - np.log(t[1])
    key = np.round(llr, decimals)
    _, inverse = np.unique(key, return_inverse=True)
    merged = np.vstack([np.bincount(inverse, weights=row) for row in t])
    return Channel(_renormalize(merged))


def _step(W: Channel, sign: str, merge: bool, max_outputs: int) -> Channel:
    m = W.output_size
    projected = m * m * (2 if sign == "+" else 1)
    if projected > max_outputs:
        raise AlphabetTooLarge(
            f"synthesized alphabet would reach {projected} outputs (limit {max_outputs}); "
            "use bec_polarize or z_bound_recursion")
    minus, plus = polar_pair(W)
    out = plus if sign == "+" else minus
    return merge_equivalent_outputs(out) if merge else out


def synthesize_bit_channel(W: Channel, n: int, i: int, *, merge: bool = False,
                           max_outputs: int = MAX_SYNTH_OUTPUTS) -> SynthChannel:
    """Exact bit-channel ``W_N^{(i)}`` for ``N = 2**n`` by repeated kernel steps."""
    _require_binary(W)
    branch = branch_of(n, i)
    ch = W
    for sign in branch:
        ch = _step(ch, sign, merge, max_outputs)
    return SynthChannel(ch, branch, i)


def synthesize_all(W: Channel, n: int, *, merge: bool = False,
                   max_outputs: int = MAX_SYNTH_OUTPUTS) -> list[SynthChannel]:
    """All ``2**n`` bit-channels in index order, sharing common prefixes."""
    _require_binary(W)
    level = [W]
    for _ in range(n):
        nxt = []
        for ch in level:
            nxt.append(_step(ch, "-", merge, max_outputs))
            nxt.append(_step(ch, "+", merge, max_outputs))
        level = nxt
    return [SynthChannel(ch, branch_of(n, k + 1), k + 1) for k, ch in enumerate(level)]


def _check_level(n: int):
    if not 0 <= n <= MAX_LEVEL:
        raise ValueError(f"level must be in 0..{MAX_LEVEL}, got {n}")


def _interleave(minus: np.ndarray, plus: np.ndarray) -> np.ndarray:
    return np.stack([minus, plus], axis=1).ravel()


def bec_polarize(eps: float, n: int) -> BecProfile:
    """Erasure probabilities after ``n`` kernel steps: ``e- = 2e - e^2``, ``e+ = e^2``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    _check_level(n)
    e = np.array([float(eps)])
    c = np.array([1.0 - float(eps)])
    for _ in range(n):
        # the complement obeys the mirrored recursion c- = c^2, c+ = 2c - c^2
        e, c = _interleave(e * (2.0 - e), e * e), _interleave(c * c, c * (2.0 - c))
    return BecProfile(n, e, c)


def z_bound_recursion(z0: float, n: int) -> ZProfile:
    """Bhattacharyya upper-bound profile: ``z- <= 2z - z^2``, ``z+ = z^2``."""
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must lie in [0, 1], got {z0}")
    _check_level(n)
    z = np.array([float(z0)])
    for _ in range(n):
        z = _interleave(z * (2.0 - z), z * z)
    return ZProfile(n, z)


def polarization_stats(values, delta: float, kind: str = "z") -> PolarizationStats:
    """Fractions of good, bad and middling bit-channels.

    For ``kind="z"`` (Bhattacharyya or erasure values) good means ``< delta``
    and bad means ``> 1 - delta``; for ``kind="rate"`` the roles flip.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 0.5), got {delta}")
    if kind not in ("z", "rate"):
        raise ValueError("kind must be 'z' or 'rate'")
    if isinstance(values, (BecProfile, ZProfile)):
        values = values.values
    v = np.asarray(values, dtype=float)
    if v.size == 0 or v.min() < 0.0 or v.max() > 1.0:
        raise ValueError("values must be a nonempty vector in [0, 1]")
    low = int(np.count_nonzero(v < delta))
    high = int(np.count_nonzero(v > 1.0 - delta))
    good, bad = (low, high) if kind == "z" else (high, low)
    total = v.size
    return PolarizationStats(good / total, bad / total, (total - good - bad) / total)


def normalized_cutoff(source) -> float:
    """Average symmetric cutoff rate over a set of bit-channels.

    ``source`` is a ``BecProfile``/``ZProfile`` (rates from ``1 - log2(1 + Z)``,
    a lower bound for Z-bound profiles), a single ``Channel`` (level 0), or an
    iterable of ``Channel``/``SynthChannel`` objects.
    """
    if isinstance(source, (BecProfile, ZProfile)):
        return float(np.mean(cutoff_from_bhattacharyya(source.values)))
    if isinstance(source, Channel):
        return symmetric_cutoff_rate(source)
    items = list(source)
    if not items:
        raise ValueError("no channels given")
    if len({s.n for s in items if isinstance(s, SynthChannel)}) > 1:
        raise ValueError("bit-channels come from different levels")
    return float(np.mean([symmetric_cutoff_rate(_unwrap(ch)) for ch in items]))


def _unwrap(ch) -> Channel:
    return ch.channel if isinstance(ch, SynthChannel) else ch


def profile_rows(profile=None, exact: Iterable[SynthChannel] | None = None) -> list[dict]:
    """Rows for the ``polarize`` CSV: index, branch, eps_or_z, symmetric_capacity, cutoff_rate.

    With ``exact`` bit-channels the values are exact; otherwise they come from
    the profile, and symmetric capacity is known only for a BEC profile.
    """
    if exact is not None:
        return [{"index": s.index, "branch": s.branch, "eps_or_z": s.bhattacharyya,
                 "symmetric_capacity": s.symmetric_capacity, "cutoff_rate": s.cutoff_rate}
                for s in exact]
    rows = []
    for k, v in enumerate(profile.values):
        cap = float(profile.complement[k]) if isinstance(profile, BecProfile) else None
        rows.append({
            "index": k + 1,
            "branch": branch_of(profile.n, k + 1),
            "eps_or_z": float(v),
            "symmetric_capacity": cap,
            "cutoff_rate": float(cutoff_from_bhattacharyya(v)),
        })
    return rows
