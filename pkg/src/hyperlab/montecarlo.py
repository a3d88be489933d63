"""Seeded Monte Carlo plumbing: counter-based per-trial streams, Wilson intervals, chunked parallelism.

Trial ``i`` of a run with seed ``s`` always draws from a Philox stream keyed by
``(s, stream)`` with counter ``i``; results therefore do not depend on how
trials are split across threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .errors import PreconditionError

CONFIDENCE = 0.99
SEED_MASK = (1 << 64) - 1

# stream tags keep independent uses of one seed apart
STREAM_SIGNS = 0
STREAM_SAMPLES = 1
STREAM_PILOT = 2
STREAM_HASH = 3
STREAM_SEARCH = 4
STREAM_INSTANCE = 5


def trial_rng(seed: int, index: int, stream: int = STREAM_SIGNS) -> np.random.Generator:
    key = (int(seed) & SEED_MASK) | ((int(stream) & SEED_MASK) << 64)
    # index in the high counter words; the low words advance as the trial draws
    return np.random.Generator(np.random.Philox(key=key, counter=int(index) << 128))


def trial_signs(seed: int, start: int, stop: int, n: int, stream: int = STREAM_SIGNS) -> np.ndarray:
    """Rademacher sign rows for trials [start, stop), shape (stop-start, n)."""
    out = np.empty((stop - start, n))
    for row, i in enumerate(range(start, stop)):
        out[row] = 2.0 * trial_rng(seed, i, stream).integers(0, 2, n) - 1.0
    return out


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("HYPERLAB_THREADS", "1") or 1)
    if threads < 1:
        raise PreconditionError("threads must be >= 1")
    return threads


def chunk_ranges(total: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def map_chunks(fn: Callable[[int, int], object], total: int, chunk: int, threads: int | None = None) -> list:
    """Apply ``fn(lo, hi)`` over fixed-size index ranges; results come back in range order."""
    ranges = chunk_ranges(total, chunk)
    threads = resolve_threads(threads)
    if threads == 1 or len(ranges) <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    if trials <= 0:
        raise PreconditionError("Wilson interval needs at least one trial")
    lo, hi = proportion_confint(int(successes), int(trials), alpha=1.0 - confidence, method="wilson")
    p = successes / trials
    return max(0.0, min(float(lo), p)), min(1.0, max(float(hi), p))


@dataclass(frozen=True)
class TailEstimate:
    threshold: float
    p_hat: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int | None
    mode: str
    details: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_counts(cls, threshold, successes, trials, seed, details=None) -> "TailEstimate":
        lo, hi = wilson_interval(successes, trials)
        return cls(float(threshold), successes / trials, lo, hi, int(trials), seed, "monte_carlo", details or {})

    @classmethod
    def exact(cls, threshold, probability, patterns, details=None) -> "TailEstimate":
        p = float(probability)
        return cls(float(threshold), p, p, p, int(patterns), None, "exact_enumeration", details or {})

    @property
    def slack(self) -> float:
        return self.ci_high - self.p_hat


def fraction_with_ci(flags: Sequence[bool]) -> tuple[float, float, float]:
    flags = np.asarray(flags, dtype=bool)
    k = int(flags.sum())
    lo, hi = wilson_interval(k, len(flags))
    return k / len(flags), lo, hi
