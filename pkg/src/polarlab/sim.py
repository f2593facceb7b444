"""Seeded Monte Carlo transmission of polar codes over discrete channels.

Every trial draws its randomness from a generator keyed by
``(master_seed, trial_index)``, and trials are decoded in fixed-size blocks.
The counters in a report are therefore identical for any number of workers.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .channel import Channel, bhattacharyya
from .polar_code import PolarCodeSpec, channel_llr, encode, fer_union_bound, sc_decode_llr

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
CSV_COLUMNS = ["channel_param", "N", "K", "rate", "trials", "frame_errors", "fer",
               "fer_ci_low", "fer_ci_high", "ber", "union_bound", "seed", "error"]


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    return splitmix64((splitmix64(master_seed & MASK64) + trial_index) & MASK64)


@dataclass(frozen=True)
class SimConfig:
    code: PolarCodeSpec
    channel: Channel
    trials: int
    master_seed: int = 0
    workers: int = 1
    early_stop: int | None = None
    block_size: int = 256
    channel_name: str = "dmc"
    channel_param: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be positive")
        if self.early_stop is not None and self.early_stop < 1:
            raise ValueError("early_stop must be positive")
        if self.channel.input_size != 2:
            raise ValueError("polar codes need a binary-input channel")
        llr = channel_llr(self.channel)
        if np.any(np.isnan(llr) & (self.channel.transitions.sum(axis=0) > 0)):
            raise ValueError("channel has outputs with undefined likelihood ratio")

    def echo(self) -> dict:
        return {
            "channel": self.channel_name,
            "channel_param": self.channel_param,
            "channel_rows": self.channel.transitions.tolist(),
            "n": self.code.n, "N": self.code.N, "K": self.code.K, "rate": self.code.rate,
            "trials": self.trials, "master_seed": self.master_seed,
            "workers": self.workers, "early_stop": self.early_stop,
            "block_size": self.block_size,
        }


@dataclass(frozen=True)
class SimReport:
    trials: int
    frame_errors: int
    bit_errors: int
    fer: float
    fer_ci: tuple[float, float]
    ber: float
    ber_ci: tuple[float, float]
    union_bound: float | None
    union_bound_raw: float | None
    early_stopped: bool
    wall_time: float
    config: dict = field(default_factory=dict)

    @property
    def fer_stderr(self) -> float:
        return math.sqrt(self.fer * (1.0 - self.fer) / self.trials)

    def counters(self) -> dict:
        d = self.to_dict()
        d.pop("wall_time")
        return d

    def to_dict(self) -> dict:
        return {
            "trials": self.trials, "frame_errors": self.frame_errors,
            "bit_errors": self.bit_errors, "fer": self.fer, "fer_ci": list(self.fer_ci),
            "ber": self.ber, "ber_ci": list(self.ber_ci),
            "union_bound": self.union_bound, "union_bound_raw": self.union_bound_raw,
            "early_stopped": self.early_stopped, "wall_time": self.wall_time,
            "config": self.config,
        }

    def csv_row(self) -> dict:
        cfg = self.config
        return {
            "channel_param": cfg.get("channel_param"), "N": cfg.get("N"), "K": cfg.get("K"),
            "rate": cfg.get("rate"), "trials": self.trials, "frame_errors": self.frame_errors,
            "fer": self.fer, "fer_ci_low": self.fer_ci[0], "fer_ci_high": self.fer_ci[1],
            "ber": self.ber, "union_bound": self.union_bound, "seed": cfg.get("master_seed"),
            "error": "",
        }


def proportion_ci(errors: int, n: int, *, level: float = 0.95,
                  degenerate_zero: bool = False) -> tuple[float, float]:
    """Normal-approximation interval, Clopper-Pearson below 10 errors.

    ``degenerate_zero`` marks a noiseless setting where the error probability
    is known to be zero, giving the interval ``(0, 0)``.
    """
    if n <= 0:
        return (0.0, 1.0)
    if degenerate_zero and errors == 0:
        return (0.0, 0.0)
    alpha = 1.0 - level
    if errors < 10:
        lo = 0.0 if errors == 0 else float(stats.beta.ppf(alpha / 2, errors, n - errors + 1))
        hi = 1.0 if errors == n else float(stats.beta.ppf(1 - alpha / 2, errors + 1, n - errors))
        return (lo, hi)
    p = errors / n
    half = stats.norm.ppf(1 - alpha / 2) * math.sqrt(p * (1 - p) / n)
    return (max(0.0, p - half), min(1.0, p + half))


def _run_block(code: PolarCodeSpec, transitions: np.ndarray, master_seed: int,
               start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    N, K = code.N, code.K
    data = np.empty((count, K), dtype=np.uint8)
    uniforms = np.empty((count, N))
    for j in range(count):
        rng = np.random.Generator(np.random.PCG64(trial_seed(master_seed, start + j)))
        data[j] = rng.integers(0, 2, size=K, dtype=np.uint8)
        uniforms[j] = rng.random(N)
    x = encode(code, data)
    cdf = np.cumsum(transitions, axis=1)[:, :-1]
    y = np.sum(uniforms[..., None] >= cdf[x], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        table = np.log(transitions[0]) - np.log(transitions[1])
    llr = table[y]
    u_hat = sc_decode_llr(code, llr)
    wrong = u_hat[:, code.active_mask] != data
    return wrong.any(axis=1), wrong.sum(axis=1)


def _blocks(trials: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(size, trials - s)) for s in range(0, trials, size)]


def run_sim(cfg: SimConfig) -> SimReport:
    """Transmit ``cfg.trials`` random data blocks and count SC decoding errors."""
    t0 = time.perf_counter()
    blocks = _blocks(cfg.trials, cfg.block_size)
    args = (cfg.code, cfg.channel.transitions, cfg.master_seed)
    frames, bits = [], []
    stop = cfg.early_stop
    errors_so_far = 0

    def consume(results):
        nonlocal errors_so_far
        for f, b in results:
            frames.append(f)
            bits.append(b)
            errors_so_far += int(f.sum())

    if cfg.workers == 1:
        for start, count in blocks:
            consume([_run_block(*args, start, count)])
            if stop is not None and errors_so_far >= stop:
                break
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            wave = cfg.workers
            for w in range(0, len(blocks), wave):
                chunk = blocks[w:w + wave]
                futures = [pool.submit(_run_block, *args, s, c) for s, c in chunk]
                consume([f.result() for f in futures])
                if stop is not None and errors_so_far >= stop:
                    break

    frame_flags = np.concatenate(frames)
    bit_counts = np.concatenate(bits)
    early = False
    if stop is not None:
        hits = np.flatnonzero(np.cumsum(frame_flags) >= stop)
        if hits.size:
            cut = int(hits[0]) + 1
            early = cut < cfg.trials
            frame_flags, bit_counts = frame_flags[:cut], bit_counts[:cut]

    trials = int(frame_flags.size)
    frame_errors = int(frame_flags.sum())
    bit_errors = int(bit_counts.sum())
    total_bits = trials * cfg.code.K
    noiseless = bhattacharyya(cfg.channel) == 0.0
    fer = frame_errors / trials
    ber = bit_errors / total_bits if total_bits else 0.0
    if cfg.code.scores is not None:
        ub, ub_raw = fer_union_bound(cfg.code)
    else:
        ub = ub_raw = None
    report = SimReport(
        trials=trials, frame_errors=frame_errors, bit_errors=bit_errors,
        fer=fer, fer_ci=proportion_ci(frame_errors, trials, degenerate_zero=noiseless),
        ber=ber, ber_ci=proportion_ci(bit_errors, total_bits, degenerate_zero=noiseless),
        union_bound=ub, union_bound_raw=ub_raw, early_stopped=early,
        wall_time=time.perf_counter() - t0, config=cfg.echo())
    log.info("simulated %d trials: %d frame errors (fer %.3g)", trials, frame_errors, fer)
    return report


def sweep(points) -> list[dict]:
    """Run each configuration in order; one CSV-ready row per point.

    A failing point yields a row with its ``error`` column filled instead of
    aborting the sweep.
    """
    points = list(points)
    if not points:
        raise ValueError("empty sweep grid")
    rows = []
    for cfg in points:
        try:
            rows.append(run_sim(cfg).csv_row())
        except Exception as exc:  # recorded per point
            log.warning("sweep point failed: %s", exc)
            row = dict.fromkeys(CSV_COLUMNS, "")
            code = getattr(cfg, "code", None)
            if code is not None:
                row.update(N=code.N, K=code.K, rate=code.rate)
            row.update(channel_param=getattr(cfg, "channel_param", ""),
                       seed=getattr(cfg, "master_seed", ""), error=str(exc))
            rows.append(row)
    return rows


def rows_to_csv(rows: list[dict], columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})
    return buf.getvalue()
