"""Low-discrepancy signings and balanced k-partitions under the hyperbolic spectral norm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .concentration import VectorSystem, mc_norm_samples, rademacher_value
from .enumeration import map_gray
from .errors import BudgetError, PreconditionError
from .forms import HyperbolicForm, _check_points
from .montecarlo import STREAM_SEARCH, map_chunks, trial_rng, trial_signs
from .spectra import CONE_TOL, RANK_TOL, eigenvalues_batch, rank_batch, spectral_norm

PARTITION_BUDGET = 2_000_000
LOCAL_SEARCH_RESTARTS = 50


@dataclass(frozen=True)
class SignAssignment:
    signs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=float)
        if s.ndim != 1 or not np.all(np.abs(s) == 1):
            raise PreconditionError("signs must be a vector of +/-1")
        s.setflags(write=False)
        object.__setattr__(self, "signs", s)

    def __len__(self):
        return len(self.signs)

    def __eq__(self, other):
        return isinstance(other, SignAssignment) and np.array_equal(self.signs, other.signs)

    def __hash__(self):
        return hash(self.signs.tobytes())


@dataclass(frozen=True)
class Partition:
    part_of: np.ndarray
    k: int

    def __post_init__(self):
        p = np.asarray(self.part_of, dtype=np.int64)
        if self.k < 1 or (p.size and (p.min() < 0 or p.max() >= self.k)):
            raise PreconditionError("partition labels must lie in [0, k)")
        p.setflags(write=False)
        object.__setattr__(self, "part_of", p)

    def parts(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.part_of == j) for j in range(self.k)]

    def __eq__(self, other):
        return isinstance(other, Partition) and self.k == other.k and np.array_equal(self.part_of, other.part_of)

    def __hash__(self):
        return hash((self.k, self.part_of.tobytes()))


# ---------------------------------------------------------------------------
# signings


def best_signs_exhaustive(sys: VectorSystem, threads=None) -> tuple[SignAssignment, float]:
    """Global minimiser of ||sum r_i x_i||_h with r_1 = +1; first minimiser in Gray order wins."""
    if sys.n == 0:
        raise PreconditionError("system has no vectors")

    def work(lo, signs, sums):
        vals = spectral_norm(eigenvalues_batch(sys.form, sums))
        vals = np.atleast_1d(vals)
        j = int(np.argmin(vals))
        return float(vals[j]), lo + j, signs[j]

    best = min(map_gray(sys.vectors, work, fixed_first=True, threads=threads), key=lambda r: (r[0], r[1]))
    # report the directly summed value, not the running Gray-code sum
    return SignAssignment(best[2]), rademacher_value(sys, best[2])


@dataclass(frozen=True)
class RandomSignSearch:
    signs: SignAssignment
    value: float
    values: np.ndarray = field(repr=False)
    seed: int = 0

    def success_fraction_at(self, threshold: float) -> float:
        return float(np.mean(self.values <= threshold))

    @property
    def trials(self) -> int:
        return len(self.values)


def best_signs_random(sys: VectorSystem, trials: int, seed: int, threads=None) -> RandomSignSearch:
    """Best of ``trials`` uniformly random signings (same streams as mc_tail)."""
    if trials < 100:
        raise PreconditionError("best_signs_random needs trials >= 100")
    values = mc_norm_samples(sys, trials, seed, threads=threads)
    j = int(np.argmin(values))
    signs = trial_signs(seed, j, j + 1, sys.n)[0]
    signs = signs * signs[0]
    return RandomSignSearch(SignAssignment(signs), rademacher_value(sys, signs), values, seed)


def signs_from_partition(part: Partition) -> SignAssignment:
    if part.k != 2:
        raise PreconditionError("signs_from_partition needs a 2-partition")
    return SignAssignment(np.where(part.part_of == 0, 1.0, -1.0))


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class PartitionResult:
    partition: Partition
    max_part_norm: float
    part_norms: np.ndarray
    eps: float
    sigma: float
    rank: int
    remark_bound: float
    method: str

    def delta_bound(self) -> float:
        """(sigma/k) * delta(k eps / sigma, n, r k), the finite-(n, r) bound."""
        from .mixed import DeltaQuery, delta_bound

        k = self.partition.k
        n = len(self.partition.part_of)
        if self.sigma == 0:
            return 0.0
        return self.sigma / k * delta_bound(DeltaQuery(k * self.eps / self.sigma, n, self.rank * k))


def subisotropic_bound(eps: float, sigma: float, k: int) -> float:
    """(sqrt(eps) + sqrt(sigma / k))^2."""
    return (math.sqrt(eps) + math.sqrt(sigma / k)) ** 2


def _part_norms(form, xs, labels: np.ndarray, k: int) -> np.ndarray:
    """Spectral norms of the k part sums for each labelling row; shape (B, k)."""
    onehot = labels[:, None, :] == np.arange(k)[None, :, None]  # (B, k, n)
    sums = onehot.astype(float) @ xs  # (B, k, m)
    eig = eigenvalues_batch(form, sums.reshape(-1, xs.shape[1]))
    return np.asarray(spectral_norm(eig)).reshape(len(labels), k)


def _objective(norms_row: np.ndarray) -> tuple:
    return tuple(np.sort(norms_row)[::-1])


def _exhaustive_partition(form, xs, k, threads):
    n = len(xs)
    total = k ** (n - 1)
    radix = k ** np.arange(n - 1, dtype=np.int64)

    def work(lo, hi):
        idx = np.arange(lo, hi, dtype=np.int64)
        labels = np.zeros((hi - lo, n), dtype=np.int64)
        labels[:, 1:] = (idx[:, None] // radix[None, :]) % k
        norms = _part_norms(form, xs, labels, k)
        worst = norms.max(axis=1)
        j = int(np.argmin(worst))
        return float(worst[j]), lo + j, labels[j], norms[j]

    best = min(map_chunks(work, total, 1 << 13, threads), key=lambda r: (r[0], r[1]))
    return best[2], best[3]


def _local_search(form, xs, k, seed):
    n = len(xs)
    best_labels, best_norms, best_key = None, None, None
    for restart in range(LOCAL_SEARCH_RESTARTS):
        rng = trial_rng(seed, restart, STREAM_SEARCH)
        labels = rng.integers(0, k, n)
        norms = _part_norms(form, xs, labels[None, :], k)[0]
        key = _objective(norms)
        improved = True
        while improved:
            improved = False
            for i in range(n):
                for target in range(k):
                    if target == labels[i]:
                        continue
                    trial = labels.copy()
                    trial[i] = target
                    t_norms = _part_norms(form, xs, trial[None, :], k)[0]
                    t_key = _objective(t_norms)
                    if t_key < key:
                        labels, norms, key, improved = trial, t_norms, t_key, True
                        break
                if improved:
                    break
        if best_key is None or key < best_key:
            best_labels, best_norms, best_key = labels, norms, key
    return best_labels, best_norms


def partition_search(
    form: HyperbolicForm,
    xs,
    k: int,
    budget: int = PARTITION_BUDGET,
    seed: int = 0,
    threads=None,
    rank_tol: float = RANK_TOL,
) -> PartitionResult:
    """Minimise max_j ||sum_{i in S_j} x_i||_h over k-partitions of cone vectors.

    Exhaustive (first label pinned to part 0) when k^n <= budget, otherwise
    seeded first-improvement local search with single-element moves.
    """
    xs = np.atleast_2d(_check_points(form, xs)).astype(float)
    if k < 2:
        raise PreconditionError("k must be >= 2")
    n = len(xs)
    if n == 0:
        raise PreconditionError("no vectors to partition")
    eig = eigenvalues_batch(form, xs)
    scale = np.maximum(1.0, np.max(np.abs(eig), axis=1))
    outside = np.flatnonzero(eig[:, -1] < -CONE_TOL * scale)
    if outside.size:
        raise PreconditionError(f"vectors outside the hyperbolic cone: indices {outside.tolist()}")
    if k**n <= budget:
        labels, norms = _exhaustive_partition(form, xs, k, threads)
        method = "exhaustive"
    else:
        labels, norms = _local_search(form, xs, k, seed)
        method = "local_search"
    eps = float(eig.sum(axis=1).max())
    sigma = float(spectral_norm(eigenvalues_batch(form, xs.sum(axis=0)[None, :]))[0])
    r = int(rank_batch(eig, rank_tol).max())
    return PartitionResult(
        Partition(labels, k), float(norms.max()), np.asarray(norms), eps, sigma, r,
        subisotropic_bound(eps, sigma, k), method,
    )


def signed_partition_bound(eps: float, sigma: float) -> float:
    """2 sqrt(eps (2 sigma - eps)) for the 2-partition signing."""
    return 2.0 * math.sqrt(max(eps * (2 * sigma - eps), 0.0))
