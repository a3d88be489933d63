"""Gray-code enumeration of Rademacher sums.

Patterns are visited in reflected Gray order; within a chunk the running sum
is advanced by a single ``±2 x_j`` flip per step (a cumulative sum of flip
deltas), and each chunk restarts from an exactly recomputed sum so rounding
does not accumulate across the whole sweep.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .errors import BudgetError
from .montecarlo import map_chunks

MAX_ENUMERATION_N = 24
CHUNK = 1 << 14


def gray(i):
    return i ^ (i >> 1)


def signs_of_codes(codes: np.ndarray, n: int) -> np.ndarray:
    """Bit j of the code set -> sign -1 at coordinate j."""
    bits = (np.asarray(codes, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def check_budget(n: int, limit: int = MAX_ENUMERATION_N) -> None:
    if n > limit:
        raise BudgetError(f"exhaustive enumeration over 2^{n} patterns exceeds the n <= {limit} budget; use Monte Carlo")


def gray_chunk(vectors: np.ndarray, lo: int, hi: int, fixed_first: bool = False):
    """Sign rows and sums for Gray indices [lo, hi).

    With ``fixed_first`` the first sign is pinned to +1 and the Gray code runs
    over the remaining ``n-1`` coordinates.
    """
    vectors = np.asarray(vectors, dtype=float)
    n = len(vectors)
    free = vectors[1:] if fixed_first else vectors
    nf = len(free)
    idx = np.arange(lo, hi, dtype=np.int64)
    codes = gray(idx)
    signs_free = signs_of_codes(codes, nf)
    start = signs_free[0] @ free
    if hi - lo > 1:
        flipped = np.log2(codes[1:] ^ codes[:-1]).astype(np.int64)
        # new sign at the flipped coordinate decides the direction of the step
        delta = 2.0 * signs_free[np.arange(1, hi - lo), flipped][:, None] * free[flipped]
        sums = np.vstack([start[None, :], start[None, :] + np.cumsum(delta, axis=0)])
    else:
        sums = start[None, :]
    if fixed_first:
        sums = sums + vectors[0]
        signs = np.hstack([np.ones((len(idx), 1)), signs_free])
    else:
        signs = signs_free
    return signs, sums


def pattern_count(n: int, fixed_first: bool = False) -> int:
    return 1 << (n - 1 if fixed_first and n > 0 else n)


def map_gray(vectors, fn, fixed_first: bool = False, threads: int | None = None, chunk: int = CHUNK) -> list:
    """Apply ``fn(lo, signs, sums)`` to every Gray chunk; results are in Gray order."""
    vectors = np.asarray(vectors, dtype=float)
    check_budget(len(vectors))
    total = pattern_count(len(vectors), fixed_first)

    def work(lo, hi):
        signs, sums = gray_chunk(vectors, lo, hi, fixed_first)
        return fn(lo, signs, sums)

    return map_chunks(work, total, chunk, threads)


def iter_gray(vectors, fixed_first: bool = False, chunk: int = CHUNK) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    vectors = np.asarray(vectors, dtype=float)
    check_budget(len(vectors))
    total = pattern_count(len(vectors), fixed_first)
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        signs, sums = gray_chunk(vectors, lo, hi, fixed_first)
        yield lo, signs, sums
