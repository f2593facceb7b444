"""Discrete memoryless channels and their single-letter information quantities.

A channel is a row-stochastic matrix ``W[x, y] = W(y|x)``.  All logarithms are
base two, so rates and exponents are in bits per channel use.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Channel:
    """Finite-alphabet memoryless channel ``W(y|x)``.

    ``transitions`` has one row per input symbol and one column per output
    symbol.  The array is copied and made read-only on construction.
    """

    transitions: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        t = np.array(self.transitions, dtype=float)
        if t.ndim != 2:
            raise ValueError("transition matrix must be two-dimensional")
        if t.shape[0] < 2:
            raise ValueError("a channel needs at least two input symbols")
        if t.shape[1] < 1:
            raise ValueError("a channel needs at least one output symbol")
        if not np.all(np.isfinite(t)) or t.min() < 0.0 or t.max() > 1.0:
            raise ValueError("transition probabilities must lie in [0, 1]")
        bad = np.abs(t.sum(axis=1) - 1.0) > PROB_TOL
        if bad.any():
            raise ValueError(f"rows {np.flatnonzero(bad).tolist()} do not sum to 1")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != t.shape[1]:
                raise ValueError("need one label per output symbol")
            object.__setattr__(self, "labels", labels)
        t.setflags(write=False)
        object.__setattr__(self, "transitions", t)

    @property
    def input_size(self) -> int:
        return self.transitions.shape[0]

    @property
    def output_size(self) -> int:
        return self.transitions.shape[1]

    @property
    def is_binary_input(self) -> bool:
        return self.input_size == 2

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return (self.transitions.shape == other.transitions.shape
                and np.array_equal(self.transitions, other.transitions))

    def __hash__(self):
        return hash((self.transitions.shape, self.transitions.tobytes()))

    def __repr__(self):
        return f"Channel({self.input_size}x{self.output_size})"

    def to_dict(self) -> dict:
        return {"inputs": self.input_size, "outputs": self.output_size,
                "rows": self.transitions.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Channel":
        rows = np.asarray(data["rows"], dtype=float)
        if rows.shape != (data["inputs"], data["outputs"]):
            raise ValueError(
                f"rows have shape {rows.shape}, header says "
                f"({data['inputs']}, {data['outputs']})")
        return cls(rows)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Channel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class InputDist:
    """Probability vector over channel inputs."""

    probs: np.ndarray = field()

    def __post_init__(self):
        q = np.array(self.probs, dtype=float).ravel()
        if q.size == 0 or q.min() < 0.0 or q.max() > 1.0:
            raise ValueError("input probabilities must lie in [0, 1]")
        if abs(q.sum() - 1.0) > PROB_TOL:
            raise ValueError("input probabilities must sum to 1")
        q.setflags(write=False)
        object.__setattr__(self, "probs", q)

    @classmethod
    def uniform(cls, size: int) -> "InputDist":
        return cls(np.full(size, 1.0 / size))

    def __len__(self):
        return self.probs.size

    def __repr__(self):
        return f"InputDist({np.array2string(self.probs, precision=6)})"


@dataclass(frozen=True)
class ChannelReport:
    capacity_bits: float
    cutoff_rate_bits: float
    bhattacharyya: float | None
    symmetric_capacity: float
    symmetric_cutoff: float
    is_symmetric: bool | None
    capacity_input: tuple[float, ...]
    cutoff_input: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "capacity_bits": self.capacity_bits,
            "cutoff_rate_bits": self.cutoff_rate_bits,
            "bhattacharyya": self.bhattacharyya,
            "symmetric_capacity": self.symmetric_capacity,
            "symmetric_cutoff": self.symmetric_cutoff,
            "is_symmetric": self.is_symmetric,
            "capacity_input": list(self.capacity_input),
            "cutoff_input": list(self.cutoff_input),
        }


# -- constructors -----------------------------------------------------------

def _check_prob(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def bsc(p: float) -> Channel:
    """Binary symmetric channel with crossover probability ``p``."""
    p = _check_prob(p, "crossover probability")
    return Channel(np.array([[1 - p, p], [p, 1 - p]]), labels=("0", "1"))


def bec(eps: float) -> Channel:
    """Binary erasure channel; outputs are ``0``, ``1`` and the erasure ``?``."""
    eps = _check_prob(eps, "erasure probability")
    return Channel(np.array([[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]]),
                   labels=("0", "1", "?"))


def qec(eps: float) -> Channel:
    """Quaternary erasure channel: four inputs, four clean outputs and one erasure."""
    eps = _check_prob(eps, "erasure probability")
    t = np.zeros((4, 5))
    t[np.arange(4), np.arange(4)] = 1 - eps
    t[:, 4] = eps
    return Channel(t, labels=("0", "1", "2", "3", "?"))


# -- information quantities -------------------------------------------------

def _probs(W: Channel, Q) -> np.ndarray:
    if Q is None:
        return np.full(W.input_size, 1.0 / W.input_size)
    q = Q.probs if isinstance(Q, InputDist) else InputDist(Q).probs
    if q.size != W.input_size:
        raise ValueError(
            f"input distribution has {q.size} entries, channel has {W.input_size} inputs")
    return q


def _require_binary(W: Channel):
    if W.input_size != 2:
        raise ValueError(f"binary-input channel required, got {W.input_size} inputs")


def capacity(W: Channel, Q=None) -> float:
    """Mutual information ``I(X;Y)`` in bits for input distribution ``Q``.

    ``Q`` defaults to the uniform distribution, giving the symmetric capacity.
    """
    q = _probs(W, Q)
    return float(_mutual_information(W.transitions, q[None, :])[0])


def _mutual_information(t: np.ndarray, qs: np.ndarray) -> np.ndarray:
    # qs: (batch, |X|) -> (batch,); 0 log 0 terms are dropped
    joint = qs[:, :, None] * t[None, :, :]
    out = joint.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(joint > 0, joint * np.log2(t[None, :, :] / out), 0.0)
    return terms.sum(axis=(1, 2))


def cutoff_rate(W: Channel, Q=None) -> float:
    """Cutoff rate ``R0(W, Q) = -log2 sum_y (sum_x Q(x) sqrt(W(y|x)))^2``."""
    q = _probs(W, Q)
    return float(-np.log2(np.sum((q @ np.sqrt(W.transitions)) ** 2)))


def bhattacharyya(W: Channel) -> float:
    """Bhattacharyya parameter ``Z(W) = sum_y sqrt(W(y|0) W(y|1))``."""
    _require_binary(W)
    t = W.transitions
    return float(min(1.0, np.sum(np.sqrt(t[0] * t[1]))))


def symmetric_capacity(W: Channel) -> float:
    return capacity(W, None)


def symmetric_cutoff_rate(W: Channel) -> float:
    return cutoff_rate(W, None)


def cutoff_from_bhattacharyya(z, q: float = 0.5):
    """Binary-input cutoff rate ``-log2(1 - s + s Z)`` with ``s = 2 Q(0) Q(1)``.

    With the default uniform input this is ``1 - log2(1 + Z)``.
    """
    s = 2.0 * q * (1.0 - q)
    return -np.log2(1.0 - s + s * np.asarray(z, dtype=float))


def _e0(t: np.ndarray, q: np.ndarray, rho: float) -> float:
    inner = q @ np.power(t, 1.0 / (1.0 + rho))
    return float(-np.log2(np.sum(inner ** (1.0 + rho))))


def gallager_e0(W: Channel, Q, rho: float) -> float:
    """Gallager's function ``E0(rho, Q)`` in bits, for ``0 <= rho <= 1``."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return _e0(W.transitions, _probs(W, Q), rho)


def _maximize_concave(f, lo: float, hi: float, tol: float) -> float:
    """Ternary search for the maximizer of a concave function on ``[lo, hi]``."""
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        f1, f2 = f(m1), f(m2)
        if f1 < f2:
            lo = m1
        elif f1 > f2:
            hi = m2
        else:
            lo, hi = m1, m2
    return 0.5 * (lo + hi)


def random_coding_exponent(W: Channel, Q, R: float, *, return_rho: bool = False):
    """Gallager's random-coding exponent ``Er(R, Q) = max_rho E0(rho, Q) - rho R``."""
    if R < 0:
        raise ValueError("rate must be nonnegative")
    t, q = W.transitions, _probs(W, Q)

    def objective(rho):
        return _e0(t, q, rho) - rho * R

    rho = _maximize_concave(objective, 0.0, 1.0, 1e-9)
    # the interior search cannot land exactly on an endpoint
    best = max((objective(r), r) for r in (0.0, rho, 1.0))
    value = best[0] if best[0] > 0.0 else 0.0
    return (value, best[1]) if return_rho else value


def critical_rate(W: Channel, Q=None, h: float = 1e-5) -> float:
    """Slope of ``E0`` at ``rho = 1``; below this rate ``Er`` has slope -1.

    Computed by a central difference; intended as a diagnostic only.
    """
    t, q = W.transitions, _probs(W, Q)
    return (_e0(t, q, 1.0 + h) - _e0(t, q, 1.0 - h)) / (2.0 * h)


# -- input optimization -----------------------------------------------------

def _objective_batch(t: np.ndarray, qs: np.ndarray, objective: str) -> np.ndarray:
    if objective == "capacity":
        return _mutual_information(t, qs)
    return -np.log2(np.sum((qs @ np.sqrt(t)) ** 2, axis=1))


def _golden_section(f, lo=0.0, hi=1.0, tol=1e-9) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        elif fc < fd:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
        else:
            # concave objective: a tie brackets the maximizer between c and d
            a, b = c, d
            c, d = b - inv * (b - a), a + inv * (b - a)
            fc, fd = f(c), f(d)
    return 0.5 * (a + b)


def _simplex_grid(k: int, step: float) -> np.ndarray:
    m = int(round(1.0 / step))
    if k == 3:
        i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
        keep = i + j <= m
        i, j = i[keep], j[keep]
        pts = np.stack([i, j, m - i - j], axis=1)
    else:
        pts = np.array([c + (m - sum(c),) for c in
                        itertools.product(range(m + 1), repeat=k - 1) if sum(c) <= m])
    return pts / m


def optimize_input(W: Channel, objective: str = "capacity") -> tuple[InputDist, float]:
    """Maximize capacity or cutoff rate over input distributions (``|X| <= 4``).

    Binary inputs use golden-section search on ``Q(0)``.  Ternary and
    quaternary inputs start from the best point of a simplex grid and are
    polished by SLSQP; both objectives are concave in ``Q`` so the local
    polish finds the global optimum.
    """
    if objective not in ("capacity", "cutoff"):
        raise ValueError("objective must be 'capacity' or 'cutoff'")
    k = W.input_size
    if k > 4:
        raise ValueError(f"input optimization supports at most 4 inputs, got {k}")
    t = W.transitions

    def value(q):
        return float(_objective_batch(t, np.asarray(q, float)[None, :], objective)[0])

    if k == 2:
        q0 = _golden_section(lambda a: value([a, 1.0 - a]))
        q = np.array([q0, 1.0 - q0])
        return InputDist(q), value(q)

    grid = _simplex_grid(k, 1e-3 if k == 3 else 2e-2)
    vals = np.concatenate([_objective_batch(t, chunk, objective)
                           for chunk in np.array_split(grid, max(1, len(grid) // 20000))])
    start = grid[int(np.argmax(vals))]
    res = optimize.minimize(
        lambda q: -value(np.clip(q, 0.0, 1.0) / np.clip(q, 0.0, 1.0).sum()),
        start, method="SLSQP", bounds=[(0.0, 1.0)] * k,
        constraints=[{"type": "eq", "fun": lambda q: q.sum() - 1.0}],
        options={"ftol": 1e-14, "maxiter": 500})
    q = np.clip(res.x, 0.0, 1.0)
    q /= q.sum()
    if value(q) < value(start):
        q = start
    return InputDist(q), value(q)


def is_symmetric(W: Channel, tol: float = PROB_TOL) -> bool:
    """True if the outputs pair up so that ``W(y|0) = W(y'|1)`` and ``W(y|1) = W(y'|0)``."""
    _require_binary(W)
    cols = [tuple(c) for c in W.transitions.T]
    unmatched = list(range(len(cols)))
    while unmatched:
        y = unmatched.pop(0)
        a, b = cols[y]
        if abs(a - b) <= tol:
            continue
        for pos, y2 in enumerate(unmatched):
            c, d = cols[y2]
            if abs(a - d) <= tol and abs(b - c) <= tol:
                unmatched.pop(pos)
                break
        else:
            return False
    return True


def channel_report(W: Channel) -> ChannelReport:
    binary = W.is_binary_input
    if W.input_size <= 4:
        q_cap, cap = optimize_input(W, "capacity")
        q_r0, r0 = optimize_input(W, "cutoff")
        q_cap, q_r0 = tuple(q_cap.probs.tolist()), tuple(q_r0.probs.tolist())
    else:
        uniform = tuple([1.0 / W.input_size] * W.input_size)
        cap, r0, q_cap, q_r0 = capacity(W), cutoff_rate(W), uniform, uniform
    return ChannelReport(
        capacity_bits=cap,
        cutoff_rate_bits=r0,
        bhattacharyya=bhattacharyya(W) if binary else None,
        symmetric_capacity=symmetric_capacity(W),
        symmetric_cutoff=symmetric_cutoff_rate(W),
        is_symmetric=is_symmetric(W) if binary else None,
        capacity_input=q_cap,
        cutoff_input=q_r0,
    )


def binary_entropy(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.where((p <= 0) | (p >= 1), 0.0, h)


def random_channel(rng: np.random.Generator, inputs: int = 2,
                   outputs: int | Sequence[int] = (2, 4)) -> Channel:
    """Draw a channel with Dirichlet(1) rows; ``outputs`` may be an inclusive range."""
    if not isinstance(outputs, int):
        outputs = int(rng.integers(outputs[0], outputs[1] + 1))
    t = rng.dirichlet(np.ones(outputs), size=inputs)
    t /= t.sum(axis=1, keepdims=True)
    return Channel(t)
