"""Rademacher sums of vectors under a hyperbolic norm.

Exact quantities come from Gray-code enumeration over sign patterns (the
first sign is pinned to +1; every functional here is invariant under a global
sign flip).  Tail probabilities come from seeded Monte Carlo with per-trial
counter streams.  Closed-form bound evaluators sit alongside so each exact or
sampled value can be compared with its bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import lgamma, log, sqrt

import numpy as np

from .enumeration import map_gray, pattern_count
from .errors import GeneratorContractError, NotHyperbolicAtPoint, PreconditionError
from .forms import HyperbolicForm, _check_points
from .generators import CONE_GENERATORS, cone_vectors
from .montecarlo import (
    STREAM_SAMPLES,
    TailEstimate,
    map_chunks,
    trial_rng,
    trial_signs,
)
from .spectra import RANK_TOL, eigenvalues_batch, hp_norm, rank_batch, spectral_norm

MC_CHUNK = 2048


@dataclass(frozen=True)
class VectorSystem:
    """A form with n vectors; sigma and max_rank are derived on construction."""

    form: HyperbolicForm
    vectors: np.ndarray
    rank_tol: float = RANK_TOL
    sigma: float = field(init=False)
    max_rank: int = field(init=False)
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vecs = np.array(_check_points(self.form, np.atleast_2d(self.vectors)), dtype=float)
        if not np.all(np.isfinite(vecs)):
            raise PreconditionError("vectors must be finite")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        eig = eigenvalues_batch(self.form, vecs) if len(vecs) else np.zeros((0, self.form.degree))
        norms = np.asarray(spectral_norm(eig), dtype=float).reshape(len(vecs))
        norms.setflags(write=False)
        object.__setattr__(self, "norms", norms)
        object.__setattr__(self, "sigma", float(np.sqrt(np.sum(norms**2))))
        ranks = rank_batch(eig, self.rank_tol) if len(vecs) else np.zeros(0, dtype=int)
        object.__setattr__(self, "max_rank", int(ranks.max(initial=0)))

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def d(self) -> int:
        return self.form.degree

    def __eq__(self, other):
        return (
            isinstance(other, VectorSystem)
            and self.form == other.form
            and np.array_equal(self.vectors, other.vectors)
            and self.rank_tol == other.rank_tol
        )

    def __hash__(self):
        return hash((self.form, self.vectors.tobytes()))


def _norm_of(eig: np.ndarray, p: float):
    return spectral_norm(eig) if np.isinf(p) else hp_norm(eig, p)


def rademacher_value(sys: VectorSystem, signs, p: float = math.inf) -> float:
    """Hyperbolic p-norm of sum_i signs_i x_i (p = inf is the spectral norm)."""
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (sys.n,):
        raise PreconditionError(f"expected {sys.n} signs, got shape {signs.shape}")
    total = signs @ sys.vectors
    return float(_norm_of(eigenvalues_batch(sys.form, total[None, :]), p)[0])


# ---------------------------------------------------------------------------
# exact enumeration


def _exact_sum(sys: VectorSystem, reducer, threads=None) -> float:
    """Mean over all 2^n patterns of ``reducer(eigenvalues)`` (a per-row array)."""
    if sys.n == 0:
        raise PreconditionError("system has no vectors")

    def work(lo, signs, sums):
        return float(np.sum(reducer(eigenvalues_batch(sys.form, sums))))

    parts = map_gray(sys.vectors, work, fixed_first=True, threads=threads)
    return math.fsum(parts) / pattern_count(sys.n, fixed_first=True)


def exact_norms(sys: VectorSystem, p: float = math.inf, threads=None) -> np.ndarray:
    """Norms of all 2^(n-1) half-patterns (each stands for a +/- pair), in Gray order."""
    if sys.n == 0:
        raise PreconditionError("system has no vectors")
    parts = map_gray(
        sys.vectors,
        lambda lo, s, sums: np.asarray(_norm_of(eigenvalues_batch(sys.form, sums), p)).reshape(-1),
        fixed_first=True,
        threads=threads,
    )
    return np.concatenate(parts)


def exact_moment(sys: VectorSystem, q: int, threads=None) -> float:
    """(E ||sum r_i x_i||_{h,2q}^{2q})^{1/(2q)} by full enumeration."""
    if q < 1:
        raise PreconditionError("q must be >= 1")
    mean = _exact_sum(sys, lambda eig: np.sum(eig ** (2 * q), axis=1), threads)
    return mean ** (1.0 / (2 * q))


def exact_spectral_moments(sys: VectorSystem, threads=None) -> tuple[float, float]:
    """(E ||X||_h, E ||X||_h^2) by enumeration."""
    norms = exact_norms(sys, threads=threads)
    return float(np.mean(norms)), float(np.mean(norms**2))


def exact_tail(sys: VectorSystem, t: float, norms: np.ndarray | None = None) -> TailEstimate:
    if norms is None:
        norms = exact_norms(sys)
    return TailEstimate.exact(t, np.mean(norms > t), 2 * len(norms))


def khinchin_ratio(sys: VectorSystem, threads=None) -> float:
    """(E||X||_h^2)^{1/2} / E||X||_h by enumeration; lies in [1, sqrt 2]."""
    first, second = exact_spectral_moments(sys, threads)
    if first == 0.0:
        raise PreconditionError("all Rademacher sums vanish; the ratio is undefined")
    return sqrt(second) / first


# ---------------------------------------------------------------------------
# closed-form bounds


def moment_bound(sigma: float, s: int, q: int) -> float:
    if q < 1 or s < 1:
        raise PreconditionError("moment_bound needs q >= 1 and s >= 1")
    return sqrt(2 * q - 1) * s ** (1.0 / (2 * q)) * sigma


def expectation_bound(sigma: float, s: int) -> tuple[float, int]:
    """Minimum of moment_bound over integer q in 1..max(2, 4 ceil(log2(s+1)))."""
    if s < 1:
        raise PreconditionError("s must be >= 1")
    q_hi = max(2, 4 * math.ceil(math.log2(s + 1)))
    best_q = min(range(1, q_hi + 1), key=lambda q: (moment_bound(1.0, s, q), q))
    return moment_bound(sigma, s, best_q), best_q


def tail_bound_rademacher(t: float, second_moment: float) -> float:
    """min(1, 2 exp(-t^2 / (32 E||X||_h^2)))."""
    if t <= 0 or second_moment <= 0:
        raise PreconditionError("tail bound needs t > 0 and a positive second moment")
    return min(1.0, 2.0 * math.exp(-(t * t) / (32.0 * second_moment)))


def tail_threshold_for(probability: float, second_moment: float) -> float:
    """Smallest t with tail_bound_rademacher(t, m2) <= probability."""
    return sqrt(32.0 * second_moment * log(2.0 / probability))


def tightest_c2(norms: np.ndarray, sigma: float, s: int, grid) -> float:
    """Largest C2 with P[||X||_h > t] <= 2 exp(-C2 t^2 / (sigma^2 log(s+1))) on every grid t."""
    best = math.inf
    scale = sigma**2 * log(s + 1)
    for t in grid:
        p = float(np.mean(norms > t))
        if p > 0:
            best = min(best, log(2.0 / p) * scale / (t * t))
    return best


def m2q(q: int) -> float:
    """((2q)! / (2^q q!))^{1/(2q)} via log-gamma."""
    if not 1 <= q <= 80:
        raise PreconditionError("m2q is defined here for 1 <= q <= 80")
    return math.exp((lgamma(2 * q + 1) - q * log(2.0) - lgamma(q + 1)) / (2 * q))


def _multinomial(total: int, parts) -> int:
    out = math.factorial(total)
    for k in parts:
        out //= math.factorial(k)
    return out


def multinomial_inequality_check(q: int, k) -> tuple[float, float]:
    """(multinomial(2q; 2k), m2q(q)^{2q} * multinomial(q; k))."""
    k = [int(v) for v in k]
    if sum(k) != q or any(v < 0 for v in k):
        raise PreconditionError(f"parts {k} must be nonnegative and sum to q={q}")
    if q > 20:
        raise PreconditionError("q must be <= 20")
    lhs = float(_multinomial(2 * q, [2 * v for v in k]))
    rhs = math.exp(2 * q * log(m2q(q))) * _multinomial(q, k)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Monte Carlo tails


def mc_norm_samples(sys: VectorSystem, trials: int, seed: int, p: float = math.inf, threads=None) -> np.ndarray:
    """||sum r_i x_i|| for trials 0..trials-1 with counter-based signs."""

    def work(lo, hi):
        signs = trial_signs(seed, lo, hi, sys.n)
        try:
            eig = eigenvalues_batch(sys.form, signs @ sys.vectors)
        except NotHyperbolicAtPoint as exc:
            # pin the failing trial for the report
            for i in range(lo, hi):
                try:
                    eigenvalues_batch(sys.form, (signs[i - lo] @ sys.vectors)[None, :])
                except NotHyperbolicAtPoint:
                    exc.trial = i
                    break
            raise
        return np.asarray(_norm_of(eig, p)).reshape(-1)

    return np.concatenate(map_chunks(work, trials, MC_CHUNK, threads))


def mc_tail(sys: VectorSystem, t: float, trials: int, seed: int, threads=None) -> TailEstimate:
    """Monte Carlo estimate of P[||sum r_i x_i||_h > t]."""
    if trials < 100:
        raise PreconditionError("mc_tail needs trials >= 100")
    norms = mc_norm_samples(sys, trials, seed, threads=threads)
    return TailEstimate.from_counts(t, int(np.sum(norms > t)), trials, seed)


# ---------------------------------------------------------------------------
# cone Chernoff


@dataclass(frozen=True)
class ConeSampleSpec:
    form: HyperbolicForm
    n: int
    generator: str
    R: float

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be >= 1")
        if not self.R > 0:
            raise PreconditionError("R must be positive")
        if self.generator not in CONE_GENERATORS:
            raise PreconditionError(f"unknown cone generator {self.generator!r}")

    def sample(self, seed: int, trial: int) -> np.ndarray:
        return cone_vectors(self.form, self.n, trial_rng(seed, trial, STREAM_SAMPLES), self.generator, self.R)


@dataclass(frozen=True)
class ConeChernoffResult:
    max_tail: TailEstimate
    min_tail: TailEstimate
    bound_max: float
    bound_min: float
    mu_max: float
    mu_min: float


def chernoff_upper_bound(d: int, mu_max: float, R: float, delta: float) -> float:
    """min(1, d ((1+delta)^{1+delta} / e^delta)^{-mu_max/R})."""
    if delta < 0:
        raise PreconditionError("delta must be >= 0")
    expo = (1 + delta) * math.log1p(delta) - delta
    return min(1.0, math.exp(math.log(d) - (mu_max / R) * expo))


def chernoff_lower_bound(d: int, mu_min: float, R: float, delta: float) -> float:
    """min(1, d ((1-delta)^{1-delta} / e^{-delta})^{-mu_min/R})."""
    if not 0 <= delta <= 1:
        raise PreconditionError("delta must lie in [0, 1]")
    expo = delta + ((1 - delta) * math.log1p(-delta) if delta < 1 else 0.0)
    return min(1.0, math.exp(math.log(d) - (mu_min / R) * expo))


def _cone_chunk(spec: ConeSampleSpec, seed: int, lo: int, hi: int):
    form, R = spec.form, spec.R
    tol = 1e-9 * R
    out = np.empty((hi - lo, 4))
    for row, i in enumerate(range(lo, hi)):
        xs = spec.sample(seed, i)
        eig = eigenvalues_batch(form, xs)
        if eig[:, -1].min() < -tol or eig[:, 0].max() > R * (1 + 1e-9):
            raise GeneratorContractError(
                f"trial {i}: sample outside the cone envelope (lambda_min={eig[:, -1].min():.3g}, "
                f"lambda_max={eig[:, 0].max():.3g}, R={R})"
            )
        tot = eigenvalues_batch(form, xs.sum(axis=0)[None, :])[0]
        out[row] = (tot[0], tot[-1], eig[:, 0].sum(), eig[:, -1].sum())
    return out


def cone_chernoff_experiment(
    spec: ConeSampleSpec, delta: float, trials: int, seed: int, threads=None, delta_min: float | None = None
) -> ConeChernoffResult:
    """Empirical upper/lower eigenvalue tails of sum x_i against the cone Chernoff bounds.

    mu_max and mu_min are estimated from the per-vector eigenvalues of the
    same trial stream; the tails then use those estimates as centres.
    ``delta_min`` defaults to ``min(delta, 1)``.
    """
    if trials < 100:
        raise PreconditionError("trials must be >= 100")
    if delta < 0:
        raise PreconditionError("delta must be >= 0")
    dmin = min(delta, 1.0) if delta_min is None else delta_min
    if not 0 <= dmin <= 1:
        raise PreconditionError("lower-tail delta must lie in [0, 1]")
    rows = np.vstack(map_chunks(lambda lo, hi: _cone_chunk(spec, seed, lo, hi), trials, 512, threads))
    mu_max = float(np.mean(rows[:, 2]))
    mu_min = float(np.mean(rows[:, 3]))
    t_max = (1 + delta) * mu_max
    t_min = (1 - dmin) * mu_min
    max_tail = TailEstimate.from_counts(t_max, int(np.sum(rows[:, 0] >= t_max)), trials, seed, {"branch": "max"})
    min_tail = TailEstimate.from_counts(t_min, int(np.sum(rows[:, 1] <= t_min)), trials, seed, {"branch": "min"})
    d = spec.form.degree
    return ConeChernoffResult(
        max_tail,
        min_tail,
        chernoff_upper_bound(d, mu_max, spec.R, delta),
        chernoff_lower_bound(d, mu_min, spec.R, dmin),
        mu_max,
        mu_min,
    )
