"""Small-ball probabilities for pairs of cone-valued Rademacher sums, and the bucketing lemma."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .enumeration import MAX_ENUMERATION_N, iter_gray
from .errors import PreconditionError
from .forms import HyperbolicForm, _check_points
from .montecarlo import STREAM_HASH, TailEstimate, map_chunks, trial_rng, trial_signs
from .spectra import eigenvalues_batch, spectral_norm

MC_CHUNK = 2048
EXACT_LIMIT = 16


def _eig(form, X):
    return eigenvalues_batch(form, np.atleast_2d(X))


@dataclass(frozen=True)
class ConePair:
    """Two families of n vectors: xs1 in the cone of form1, xs2 in minus the cone of form2."""

    form1: HyperbolicForm
    form2: HyperbolicForm
    xs1: np.ndarray
    xs2: np.ndarray
    tau: float
    y1: np.ndarray | None = None
    y2: np.ndarray | None = None
    require_mass: bool = False
    eig1: np.ndarray = field(init=False, repr=False)
    eig2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xs1 = np.atleast_2d(_check_points(self.form1, self.xs1)).astype(float)
        xs2 = np.atleast_2d(_check_points(self.form2, self.xs2)).astype(float)
        if len(xs1) != len(xs2):
            raise PreconditionError("both families need the same number of vectors")
        if not self.tau > 0:
            raise PreconditionError("tau must be positive")
        y1 = np.zeros(self.form1.dimension) if self.y1 is None else _check_points(self.form1, self.y1).astype(float)
        y2 = np.zeros(self.form2.dimension) if self.y2 is None else _check_points(self.form2, self.y2).astype(float)
        eig1, eig2 = _eig(self.form1, xs1), _eig(self.form2, xs2)
        slack = 1e-9 * self.tau
        bad = np.flatnonzero((eig1[:, -1] < -slack) | (eig1[:, 0] > self.tau + slack))
        if bad.size:
            raise PreconditionError(f"xs1 must satisfy 0 <= lambda <= tau; violating indices {bad.tolist()}")
        bad = np.flatnonzero((eig2[:, 0] > slack) | (eig2[:, -1] < -self.tau - slack))
        if bad.size:
            raise PreconditionError(f"xs2 must satisfy -tau <= lambda <= 0; violating indices {bad.tolist()}")
        if self.require_mass:
            if np.sum(eig1[:, -1] ** 2) < 1 - 1e-9 or np.sum(eig2[:, 0] ** 2) < 1 - 1e-9:
                raise PreconditionError("sum of squared smallest-magnitude eigenvalues must be >= 1 in both families")
        for name, val in (("xs1", xs1), ("xs2", xs2), ("y1", y1), ("y2", y2), ("eig1", eig1), ("eig2", eig2)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return len(self.xs1)

    def shifted(self, k: int, p: int) -> "ConePair":
        """Shift both targets by (k-1)/(2 tau p) along each direction."""
        c = (k - 1) / (2 * self.tau * p)
        return ConePair(
            self.form1, self.form2, self.xs1, self.xs2, self.tau,
            self.y1 + c * self.form1.direction, self.y2 + c * self.form2.direction, self.require_mass,
        )


def _pair_stats(pair: ConePair, signs: np.ndarray):
    """Norm distances to y_j and lambda_max of the shifted sums, per sign row."""
    e1 = _eig(pair.form1, signs @ pair.xs1 - pair.y1)
    e2 = _eig(pair.form2, signs @ pair.xs2 - pair.y2)
    return spectral_norm(e1), spectral_norm(e2), e1[:, 0], e2[:, 0]


def _all_signs(n: int):
    for _, signs, _ in iter_gray(np.zeros((n, 1))):
        yield signs


def _interval_flags(stats, delta):
    n1, n2, l1, _ = stats
    hit = (n1 <= delta) | (n2 <= delta)
    window = np.abs(l1) <= delta
    return hit, window


def interval_probability(pair: ConePair, delta: float, trials: int, seed: int, threads=None) -> TailEstimate:
    """P[exists j: ||sum eps_i x_i^j - y_j||_{h_j} <= delta] under uniform signs.

    ``details['window']`` carries the companion estimate of
    P[lambda_max(sum eps_i x_i^1 - y_1) in [-delta, delta]].
    """
    if not delta > 0:
        raise PreconditionError("delta must be positive")
    if trials < 1000:
        raise PreconditionError("interval_probability needs trials >= 1000")

    def work(lo, hi):
        hit, window = _interval_flags(_pair_stats(pair, trial_signs(seed, lo, hi, pair.n)), delta)
        return int(hit.sum()), int(window.sum())

    counts = np.array(map_chunks(work, trials, MC_CHUNK, threads)).sum(axis=0)
    window = TailEstimate.from_counts(delta, int(counts[1]), trials, seed)
    return TailEstimate.from_counts(delta, int(counts[0]), trials, seed, {"window": window})


def exact_interval_probability(pair: ConePair, delta: float) -> TailEstimate:
    if pair.n > EXACT_LIMIT:
        raise PreconditionError(f"exact enumeration limited to n <= {EXACT_LIMIT}")
    hits = windows = total = 0
    for signs in _all_signs(pair.n):
        hit, window = _interval_flags(_pair_stats(pair, signs), delta)
        hits += int(hit.sum())
        windows += int(window.sum())
        total += len(signs)
    window = TailEstimate.exact(delta, windows / total, total)
    return TailEstimate.exact(delta, hits / total, total, {"window": window})


def min_pair_distance(pair: ConePair) -> float:
    """min over all sign patterns of min_j ||sum eps_i x_i^j - y_j||_{h_j}."""
    if pair.n > EXACT_LIMIT:
        raise PreconditionError(f"exact enumeration limited to n <= {EXACT_LIMIT}")
    best = math.inf
    for signs in _all_signs(pair.n):
        n1, n2, _, _ = _pair_stats(pair, signs)
        best = min(best, float(np.min(np.minimum(n1, n2))))
    return best


def max_pair_distance(pair: ConePair) -> float:
    """Max over patterns of min_j distance: any delta at or above it captures every pattern."""
    if pair.n > EXACT_LIMIT:
        raise PreconditionError(f"exact enumeration limited to n <= {EXACT_LIMIT}")
    worst = 0.0
    for signs in _all_signs(pair.n):
        n1, n2, _, _ = _pair_stats(pair, signs)
        worst = max(worst, float(np.max(np.minimum(n1, n2))))
    return worst


# ---------------------------------------------------------------------------
# robust Littlewood-Offord boundary


def alpha_fraction(pair: ConePair, rho: float) -> tuple[float, np.ndarray]:
    """Fraction of indices with lambda_min,1(x_i^1) >= rho and lambda_max,2(x_i^2) <= -rho."""
    ok = (pair.eig1[:, -1] >= rho) & (pair.eig2[:, 0] <= -rho)
    return float(ok.mean()), np.flatnonzero(~ok)


def _boundary_flags(pair, signs, rho):
    _, _, l1, l2 = _pair_stats(pair, signs)
    return ((l1 > -2 * rho) & (l1 <= 0)) | ((l2 > -2 * rho) & (l2 <= 0))


def boundary_measure(pair: ConePair, rho: float, trials: int, seed: int, threads=None, exact: bool | None = None) -> TailEstimate:
    """P[exists j: lambda_max(sum eps_i x_i^j - y_j) in (-2 rho, 0]].

    Exact enumeration is used when n <= 16 unless ``exact`` is False.  The
    report carries alpha, n and the implied constant p_hat * alpha * sqrt(n).
    """
    if not rho > 0:
        raise PreconditionError("rho must be positive")
    alpha, violating = alpha_fraction(pair, rho)
    if alpha == 0.0:
        raise PreconditionError(f"alpha-fraction hypothesis fails for rho={rho}: violating indices {violating.tolist()}")
    use_exact = pair.n <= EXACT_LIMIT if exact is None else exact
    if use_exact:
        hits = total = 0
        for signs in _all_signs(pair.n):
            flags = _boundary_flags(pair, signs, rho)
            hits += int(flags.sum())
            total += len(flags)
        p = hits / total
        details = {"alpha": alpha, "n": pair.n, "implied_constant": p * alpha * math.sqrt(pair.n)}
        return TailEstimate.exact(rho, p, total, details)
    if trials < 1:
        raise PreconditionError("trials must be >= 1")

    def work(lo, hi):
        return int(_boundary_flags(pair, trial_signs(seed, lo, hi, pair.n), rho).sum())

    hits = sum(map_chunks(work, trials, MC_CHUNK, threads))
    p = hits / trials
    details = {"alpha": alpha, "n": pair.n, "implied_constant": p * alpha * math.sqrt(pair.n)}
    return TailEstimate.from_counts(rho, hits, trials, seed, details)


# ---------------------------------------------------------------------------
# bucketing lemma


@dataclass(frozen=True)
class BucketHash:
    p: int
    assignment: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if self.p < 1:
            raise PreconditionError("bucket count must be >= 1")
        if a.size and (a.min() < 0 or a.max() >= self.p):
            raise PreconditionError("bucket assignment out of range")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    def counts(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.p)


def random_bucket_hash(n: int, p: int, seed: int, index: int = 0) -> BucketHash:
    """Independent uniform bucket per index; ``index`` selects one of many seeded hashes."""
    if p < 1:
        raise PreconditionError("p must be >= 1")
    rng = trial_rng(seed, index, STREAM_HASH)
    return BucketHash(p, rng.integers(0, p, n))


def check_bucket_hypotheses(form: HyperbolicForm, eig: np.ndarray, tau: float) -> None:
    slack = 1e-9
    if eig[:, -1].min(initial=0) < -slack * max(tau, 1.0):
        raise PreconditionError("vectors must lie in the hyperbolic cone")
    if eig[:, 0].max(initial=0) > tau * (1 + slack):
        raise PreconditionError("every lambda_max must be <= tau")
    if np.sum(eig[:, -1] ** 2) < 1 - slack:
        raise PreconditionError("sum of lambda_min^2 must be >= 1")


def lemma_bucket_minimum(tau: float, d: int) -> float:
    """Smallest bucket count the lemma allows: 1 / (10 tau^2 log d)."""
    return 1.0 / (10 * tau * tau * math.log(d))


def good_bucket_fraction(form: HyperbolicForm, xs, hash: BucketHash, tau: float, eig=None) -> tuple[int, float]:
    """(number of buckets c with lambda_min(sigma_c) >= 1/(2 tau p), that threshold)."""
    xs = np.atleast_2d(_check_points(form, xs))
    if len(hash.assignment) != len(xs):
        raise PreconditionError("hash length must match the number of vectors")
    if eig is None:
        eig = eigenvalues_batch(form, xs)
    check_bucket_hypotheses(form, eig, tau)
    sums = np.zeros((hash.p, form.dimension))
    np.add.at(sums, hash.assignment, xs)
    lam_min = eigenvalues_batch(form, sums)[:, -1]
    threshold = 1.0 / (2 * tau * hash.p)
    return int(np.sum(lam_min >= threshold)), threshold


@dataclass(frozen=True)
class BucketExperiment:
    hashes: int
    p: int
    bad: int
    frequency: float
    ci_high: float
    bound: float
    good_counts: np.ndarray

    @property
    def passed(self) -> bool:
        return self.frequency <= self.bound + (self.ci_high - self.frequency)


def bucket_lemma_experiment(form, xs, tau: float, p: int, hashes: int, seed: int) -> BucketExperiment:
    """Frequency over seeded hashes of {good buckets <= 4p/5} versus exp(-p/4)."""
    from .montecarlo import wilson_interval

    xs = np.atleast_2d(_check_points(form, xs))
    eig = eigenvalues_batch(form, xs)
    check_bucket_hypotheses(form, eig, tau)
    goods = np.array(
        [good_bucket_fraction(form, xs, random_bucket_hash(len(xs), p, seed, i), tau, eig)[0] for i in range(hashes)]
    )
    bad = int(np.sum(goods <= 0.8 * p))
    _, hi = wilson_interval(bad, hashes)
    return BucketExperiment(hashes, p, bad, bad / hashes, hi, math.exp(-p / 4), goods)
