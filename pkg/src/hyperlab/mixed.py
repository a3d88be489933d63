"""Mixed hyperbolic polynomials and the partition bound function delta(eps, n, r).

The mixed polynomial of h and v_1..v_n, evaluated at x = t e and y = 1, is

    p(t) = sum_{S subset [n]} (-1)^{|S|} (D_{v_S} h)(t e)

and its largest root is the quantity compared against lambda_max(v_1 + ... + v_n).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, InfeasibleError, NumericalFailure, NotHyperbolicAtPoint, PreconditionError
from .forms import HyperbolicForm, _check_points
from .interp import integer_nodes, monomial_matrix
from .spectra import CONE_TOL, eigenvalues_batch, real_roots_of

MAX_MIXED_N = 12


@dataclass(frozen=True)
class MixedRestriction:
    """Ascending coefficients of t -> h[v_1..v_n](t e, 1)."""

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coefficients)
        return int(nz[-1]) if nz.size else 0


def _subset_derivatives(form: HyperbolicForm, vs: np.ndarray, size: int) -> tuple[list, np.ndarray]:
    """D_{v_S} h(e) for every |S| = size, by tensor interpolation on {0..d}^size."""
    d = form.degree
    subsets = list(itertools.combinations(range(len(vs)), size))
    if size == 0:
        return subsets, np.array([form.h_of_e()])
    nodes = integer_nodes(d + 1)
    W1 = monomial_matrix(nodes)[1]
    grid = np.array(list(itertools.product(nodes, repeat=size)))  # (G, size)
    V = vs[np.array(subsets)]  # (S, size, m)
    pts = form.direction + np.einsum("gk,skm->sgm", grid, V)
    vals = form._evaluate_batch(pts.reshape(-1, form.dimension)).reshape((len(subsets),) + (d + 1,) * size)
    for _ in range(size):
        vals = np.tensordot(vals, W1, axes=([1], [0]))
    return subsets, vals.reshape(len(subsets))


def mixed_restriction(form: HyperbolicForm, vs, check_cone: bool = True) -> MixedRestriction:
    """Coefficient vector of the mixed polynomial restricted to (t e, 1).

    Each subset term is homogeneous of degree d - |S| in t, so it contributes
    (-1)^{|S|} D_{v_S} h(e) to the coefficient of t^{d-|S|}; subsets larger
    than d vanish.
    """
    vs = np.asarray(vs, dtype=float).reshape(-1, form.dimension)
    n = len(vs)
    if n > MAX_MIXED_N:
        raise BudgetError(f"inclusion-exclusion over 2^{n} subsets exceeds the n <= {MAX_MIXED_N} budget")
    if n:
        _check_points(form, vs)
        if check_cone:
            eig = eigenvalues_batch(form, vs)
            scale = np.maximum(1.0, np.abs(eig).max(axis=1))
            bad = np.flatnonzero(eig[:, -1] < -CONE_TOL * scale)
            if bad.size:
                raise PreconditionError(f"vectors outside the hyperbolic cone: indices {bad.tolist()}")
    d = form.degree
    coef = np.zeros(d + 1)
    for size in range(0, min(n, d) + 1):
        _, derivs = _subset_derivatives(form, vs, size)
        coef[d - size] += (-1) ** size * math.fsum(derivs)
    return MixedRestriction(coef)


def mixed_roots(form: HyperbolicForm, vs) -> np.ndarray:
    mr = mixed_restriction(form, vs)
    try:
        return real_roots_of(mr.coefficients)
    except NotHyperbolicAtPoint as exc:
        raise NumericalFailure(
            f"mixed polynomial has a non-real root {exc.root:.6g}", residual=abs(exc.root.imag)
        ) from exc


def lambda_max_mixed(form: HyperbolicForm, vs) -> float:
    """Largest real root of the mixed restriction."""
    roots = mixed_roots(form, vs)
    return float(roots[0]) if roots.size else 0.0


# ---------------------------------------------------------------------------
# delta(eps, n, r)


@dataclass(frozen=True)
class DeltaQuery:
    eps: float
    n: float = math.inf
    r: float = math.inf

    def __post_init__(self):
        if not self.eps > 0:
            raise PreconditionError("eps must be positive")
        if not (self.n >= 1 and (math.isinf(self.n) or float(self.n).is_integer())):
            raise PreconditionError("n must be a natural number >= 1 or infinity")
        if not (self.r >= 1 and (math.isinf(self.r) or float(self.r).is_integer())):
            raise PreconditionError("r must be a natural number >= 1 or infinity")


@dataclass(frozen=True)
class DeltaBoundResult:
    value: float
    delta: float
    mu: float
    grid_value: float
    grid_log_step: float


GRID_LO, GRID_HI, GRID_POINTS = 1e-3, 1e3, 200
REFINE_REL_STEP = 1e-7


def _bracket_term(delta, mu, r):
    """((1+u)^{r-1} - u^{r-1}) / ((1+u)^r - u^r) with u = delta/(r mu); equals 1 in the r -> inf limit."""
    if math.isinf(r):
        return np.ones_like(np.asarray(delta * mu, dtype=float))
    u = delta / (r * mu)
    rho = u / (1.0 + u)
    # rewritten with rho = u/(1+u) < 1 to avoid overflow at large r
    return (1.0 - rho ** (r - 1)) / ((1.0 + u) * (1.0 - rho**r))


def feasible(delta, mu, r) -> np.ndarray:
    """Membership of (delta, mu) in U_r, with strict side conditions as written."""
    delta = np.asarray(delta, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        main = delta - 1.0 >= (delta / mu) * _bracket_term(delta, mu, r)
        side_r = 0.0 if math.isinf(r) else delta / r
        side = (mu > 1.0) | ((delta >= 1.0) & (delta <= 2.0) & (mu > 1.0 - side_r))
    return main & side & (delta > 0) & (mu > 0)


def delta_objective(eps, n, delta, mu):
    if math.isinf(n):
        return eps * mu + delta
    return (eps * mu + (1.0 - 1.0 / n) * delta) / (1.0 + (mu - 1.0) / n)


def _min_feasible_delta(mu: float, r: float) -> float | None:
    """Smallest feasible delta in the grid box for this mu (None if there is none)."""
    grid = np.geomspace(GRID_LO, GRID_HI, 4000)
    ok = feasible(grid, mu, r)
    if not ok.any():
        return None
    j = int(np.argmax(ok))
    hi = grid[j]
    if j == 0:
        return hi
    lo = grid[j - 1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if feasible(mid, mu, r):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return float(hi)


def solve_delta_bound(q: DeltaQuery) -> DeltaBoundResult:
    """Grid search plus refinement for inf over U_r of the delta objective.

    Only feasible pairs are ever evaluated, so the result is an upper envelope
    of the true infimum.
    """
    eps, n, r = q.eps, q.n, q.r
    axis = np.geomspace(GRID_LO, GRID_HI, GRID_POINTS)
    D, M = np.meshgrid(axis, axis, indexing="ij")
    ok = feasible(D, M, r)
    if not ok.any():
        raise InfeasibleError(f"no feasible (delta, mu) on the {GRID_POINTS}x{GRID_POINTS} grid for {q}")
    obj = np.where(ok, delta_objective(eps, n, D, M), np.inf)
    i, j = np.unravel_index(int(np.argmin(obj)), obj.shape)
    grid_value = float(obj[i, j])
    best = (grid_value, float(D[i, j]), float(M[i, j]))
    step = math.log(axis[1] / axis[0])

    def phi(log_mu):
        mu = math.exp(log_mu)
        dmin = _min_feasible_delta(mu, r)
        if dmin is None:
            return math.inf, None, mu
        return float(delta_objective(eps, n, dmin, mu)), dmin, mu

    # golden-section on log(mu) with delta pinned to its feasibility boundary
    a = math.log(best[2]) - 2 * step
    b = math.log(best[2]) + 2 * step
    a, b = max(a, math.log(GRID_LO)), min(b, math.log(GRID_HI))
    g = (math.sqrt(5) - 1) / 2
    c, d_ = b - g * (b - a), a + g * (b - a)
    fc, fd = phi(c), phi(d_)
    for cand in (fc, fd):
        if cand[1] is not None and cand[0] < best[0]:
            best = (cand[0], cand[1], cand[2])
    while (b - a) > REFINE_REL_STEP:
        if fc[0] <= fd[0]:
            b, d_, fd = d_, c, fc
            c = b - g * (b - a)
            fc = phi(c)
            cand = fc
        else:
            a, c, fc = c, d_, fd
            d_ = a + g * (b - a)
            fd = phi(d_)
            cand = fd
        if cand[1] is not None and cand[0] < best[0]:
            best = (cand[0], cand[1], cand[2])
    return DeltaBoundResult(best[0], best[1], best[2], grid_value, step)


def delta_bound(q: DeltaQuery) -> float:
    return solve_delta_bound(q).value


def closed_form_delta_inf(eps: float) -> float:
    """(1 + sqrt(eps))^2, the n = r = infinity value."""
    return (1.0 + math.sqrt(eps)) ** 2
