"""Hyperbolic eigenvalues and the norm / trace / rank / cone functionals.

The eigenvalues of ``x`` are the roots of ``t -> h(te - x)``.  The generic
path samples that restriction at Chebyshev nodes on ``[-R, R]``, interpolates,
and takes companion-matrix eigenvalues polished by Aberth iterations.  All work
is done in the scaled variable ``u = t / R`` so the nodes stay in [-1, 1].
The estimates are then bracketed by sign changes of h itself and refined, which
recovers small roots that the interpolated coefficients cannot resolve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import NotHyperbolicAtPoint, PreconditionError
from .forms import HyperbolicForm, _check_points, derivative_along
from .interp import chebyshev_nodes, monomial_matrix

IMAG_TOL = 1e-7
RANK_TOL = 1e-8
CONE_TOL = 1e-9
MAX_DOUBLINGS = 8
ABERTH_ITERS = 40
ABERTH_RESIDUAL = 1e-13


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class UnivariateRestriction:
    """Ascending coefficients of t -> h(te - x)."""

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coefficients)


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    scale: float = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise PreconditionError("Spectrum values must be one-dimensional")
        if np.any(np.diff(vals) > 0):
            vals = -np.sort(-vals, kind="stable")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "scale", float(np.max(np.abs(vals))) if vals.size else 0.0)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, Spectrum) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    @property
    def lambda_max(self) -> float:
        return float(self.values[0])

    @property
    def lambda_min(self) -> float:
        return float(self.values[-1])

    def to_json(self) -> list[float]:
        return [float(v) for v in self.values]


@dataclass(frozen=True)
class RankReport:
    rank: int
    tolerance_used: float


# ---------------------------------------------------------------------------
# restriction


def _scaled_restriction(form: HyperbolicForm, X: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Coefficients a_j with h(R u e - x) = sum_j a_j u^j, one row per point."""
    d, m = form.degree, form.dimension
    nodes = chebyshev_nodes(d + 1)
    T = R[:, None] * nodes[None, :]
    pts = T[..., None] * form.direction - X[:, None, :]
    vals = form._evaluate_batch(pts.reshape(-1, m)).reshape(len(X), d + 1)
    return vals @ monomial_matrix(nodes).T


def _initial_radius(X: np.ndarray) -> np.ndarray:
    return 1.0 + np.linalg.norm(X, axis=-1)


def restrict(form: HyperbolicForm, x) -> UnivariateRestriction:
    """Coefficients of t -> h(te - x), recovered by Chebyshev interpolation."""
    x = _check_points(form, x)
    if x.ndim != 1:
        raise PreconditionError("restrict takes a single point; use restrict_batch")
    coeffs, _ = restrict_batch(form, x[None, :])
    return UnivariateRestriction(coeffs[0])


def restrict_batch(form: HyperbolicForm, X) -> tuple[np.ndarray, np.ndarray]:
    """Return (t-coefficients (N, d+1), radii (N,)) with the radius-doubling rule applied."""
    X = np.atleast_2d(_check_points(form, X))
    a, R, _ = _restriction_and_roots(form, X)
    powers = R[:, None] ** -np.arange(form.degree + 1)[None, :]
    return a * powers, R


# ---------------------------------------------------------------------------
# roots


def _companion_roots(a: np.ndarray) -> np.ndarray:
    """Roots of each row's ascending polynomial via balanced companion eigenvalues."""
    N, n1 = a.shape
    d = n1 - 1
    if d == 0:
        return np.zeros((N, 0), dtype=complex)
    monic = a[:, :-1] / a[:, -1:]
    if d == 1:
        return (-monic).astype(complex)
    C = np.zeros((N, d, d))
    C[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    C[:, :, -1] = -monic
    # numpy's geev driver balances (permute + scale) before the QR iteration
    return np.linalg.eigvals(C)


def _horner(a: np.ndarray, z: np.ndarray):
    """Values and derivatives of ascending polynomials (rows of a) at z (N, k)."""
    p = np.zeros_like(z, dtype=complex) + a[:, -1:]
    dp = np.zeros_like(p)
    for j in range(a.shape[1] - 2, -1, -1):
        dp = dp * z + p
        p = p * z + a[:, j : j + 1]
    return p, dp


def aberth_polish(a: np.ndarray, z: np.ndarray, iters: int = ABERTH_ITERS) -> np.ndarray:
    """Refine approximate roots ``z`` of the rows of ``a``; only residual-reducing steps are kept."""
    z = np.array(z, dtype=complex, copy=True)
    if z.shape[1] <= 1:
        return z
    absa = np.abs(a)
    for _ in range(iters):
        p, dp = _horner(a, z)
        bound = np.zeros(z.shape)
        mag = np.ones(z.shape)
        for j in range(a.shape[1]):
            bound += absa[:, j : j + 1] * mag
            mag = mag * np.abs(z)
        resid = np.abs(p)
        active = resid > ABERTH_RESIDUAL * bound
        if not active.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            diff = z[:, :, None] - z[:, None, :]
            inv = 1.0 / diff
            idx = np.arange(z.shape[1])
            inv[:, idx, idx] = 0.0
            s = inv.sum(axis=2)
            step = w / (1.0 - w * s)
        cand = z - step
        ok = active & np.isfinite(cand)
        if not ok.any():
            break
        p_new, _ = _horner(a, np.where(ok, cand, z))
        better = ok & (np.abs(p_new) < resid)
        if not better.any():
            break
        z = np.where(better, cand, z)
    return z


def _restriction_and_roots(form: HyperbolicForm, X: np.ndarray):
    """Scaled coefficients, radii and scaled roots for a batch of points."""
    if form.h_of_e() == 0.0:
        raise PreconditionError("h(e) = 0: direction is not hyperbolic")
    N = len(X)
    R = _initial_radius(X)
    a = np.empty((N, form.degree + 1))
    u = np.empty((N, form.degree), dtype=complex)
    todo = np.arange(N)
    for attempt in range(MAX_DOUBLINGS + 1):
        a_t = _scaled_restriction(form, X[todo], R[todo])
        u_t = aberth_polish(a_t, _companion_roots(a_t))
        a[todo] = a_t
        u[todo] = u_t
        too_big = np.max(np.abs(u_t), axis=1, initial=0.0) > 0.8
        if not too_big.any() or attempt == MAX_DOUBLINGS:
            break
        todo = todo[too_big]
        R[todo] *= 2.0
    return a, R, u


def restriction_roots(form: HyperbolicForm, X) -> np.ndarray:
    """All complex roots (N, d) of t -> h(te - x) for each row of X."""
    X = np.atleast_2d(_check_points(form, X))
    _, R, u = _restriction_and_roots(form, X)
    return u * R[:, None]


def _merge_clusters(a_row: np.ndarray, u_row: np.ndarray, suspect: np.ndarray):
    """Replace clusters around complex roots by their real centroid.

    Returns the merged real roots, or None when the merged factorisation does
    not reproduce the coefficients (the point is genuinely non-hyperbolic).
    """
    d = len(u_row)
    link = 3.0 * np.max(np.abs(u_row[suspect].imag))
    label = np.arange(d)
    for i in range(d):
        for j in range(i + 1, d):
            if abs(u_row[i] - u_row[j]) <= link:
                old, new = label[j], label[i]
                label[label == old] = new
    merged = u_row.real.copy()
    for lab in np.unique(label):
        members = label == lab
        if np.any(members & suspect):
            merged[members] = np.mean(u_row[members]).real
    rebuilt = np.polynomial.polynomial.polyfromroots(merged) * a_row[-1]
    if np.max(np.abs(rebuilt - a_row)) <= 1e-8 * np.max(np.abs(a_row)):
        return merged
    return None


LINE_SAMPLES = 1024
REFINE_ITERS = 100


def _h_line(form: HyperbolicForm, X: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """h(t e - x) for paired rows of X and entries of ts."""
    return form._evaluate_batch(ts[:, None] * form.direction - X)


def _refine_brackets(form, X, lo, hi, flo, tol):
    """Shrink sign-change brackets [lo, hi] by Illinois false position with periodic bisection."""
    lo, hi, flo = lo.copy(), hi.copy(), flo.copy()
    fhi = _h_line(form, X, hi)
    side = np.zeros(len(lo), dtype=int)
    for it in range(REFINE_ITERS):
        todo = (hi - lo) > tol
        if not todo.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            fp = hi - fhi * (hi - lo) / (fhi - flo)
        mid = 0.5 * (lo + hi)
        ok = np.isfinite(fp) & (fp > lo) & (fp < hi)
        c = np.where(ok & (it % 4 != 3), fp, mid)
        fc = _h_line(form, X, c)
        fc = np.where(todo, fc, 0.0)
        left = np.sign(fc) == np.sign(flo)
        # Illinois: halve the stale endpoint's value when the same side moves twice
        fhi = np.where(left & (side == 1), 0.5 * fhi, fhi)
        flo = np.where(~left & (side == -1), 0.5 * flo, flo)
        lo, flo = np.where(todo & left, c, lo), np.where(todo & left, fc, flo)
        hi, fhi = np.where(todo & ~left, c, hi), np.where(todo & ~left, fc, fhi)
        side = np.where(left, 1, -1)
        exact = todo & (fc == 0)
        lo, hi = np.where(exact, c, lo), np.where(exact, c, hi)
    return 0.5 * (lo + hi)


def _group_scan(form, x, top, bottom, count):
    """Sign-change brackets of h(te - x) inside [bottom, top], or None unless exactly ``count`` appear."""
    ts = np.linspace(top, bottom, LINE_SAMPLES)
    vals = _h_line(form, np.broadcast_to(x, (len(ts), len(x))), ts)
    flips = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    if len(flips) != count:
        return None
    return ts[flips + 1], ts[flips], vals[flips + 1]


def _verified_roots(form: HyperbolicForm, X: np.ndarray, t: np.ndarray):
    """Refine approximate roots by bracketing them with direct evaluations of h.

    d sign changes of h(te - x) certify d real roots, so a row is accepted only
    when every root is bracketed.  Returns (roots, ok-mask).
    """
    N, d = t.shape
    r = -np.sort(-t.real, axis=1)
    scale = np.max(np.abs(t), axis=1) + np.max(np.abs(X), axis=1) + 1e-300
    pad = 0.1 * scale
    probes = np.empty((N, d + 1))
    probes[:, 0] = r[:, 0] + pad
    probes[:, 1:d] = 0.5 * (r[:, :-1] + r[:, 1:])
    probes[:, d] = r[:, -1] - pad
    f = _h_line(form, np.repeat(X, d + 1, axis=0), probes.ravel()).reshape(N, d + 1)
    expect = np.sign(form.h_of_e()) * (-1.0) ** np.arange(d + 1)
    anchor = np.sign(f) == expect
    tol = 4.0 * np.finfo(float).eps * scale

    lo_l, hi_l, flo_l, row_l, col_l = [], [], [], [], []
    ok = anchor[:, 0] & anchor[:, d]
    for row in np.flatnonzero(ok):
        idx = np.flatnonzero(anchor[row])
        for i, j in zip(idx[:-1], idx[1:]):
            if j - i == 1:
                brackets = (probes[row, j : j + 1], probes[row, i : i + 1], f[row, j : j + 1])
            else:
                # scan just around the cluster's estimates, inside the anchored bracket
                spread = r[row, i] - r[row, j - 1] + 1e-9 * scale[row]
                top = min(probes[row, i], r[row, i] + spread)
                bottom = max(probes[row, j], r[row, j - 1] - spread)
                brackets = _group_scan(form, X[row], top, bottom, j - i)
                if brackets is None:
                    brackets = _group_scan(form, X[row], probes[row, i], probes[row, j], j - i)
                if brackets is None:
                    ok[row] = False
                    break
            lo_l.append(brackets[0])
            hi_l.append(brackets[1])
            flo_l.append(brackets[2])
            row_l.append(np.full(j - i, row))
            col_l.append(np.arange(i, j))
    out = r.copy()
    if lo_l:
        rows, cols = np.concatenate(row_l), np.concatenate(col_l)
        keep = ok[rows]
        rows, cols = rows[keep], cols[keep]
        lo, hi, flo = (np.concatenate(v)[keep] for v in (lo_l, hi_l, flo_l))
        out[rows, cols] = _refine_brackets(form, X[rows], lo, hi, flo, tol[rows])
    return -np.sort(-out, axis=1), ok


def _real_roots(a: np.ndarray, u: np.ndarray, R: np.ndarray, X, imag_tol: float) -> np.ndarray:
    t = u * R[:, None]
    bad = np.abs(t.imag) > imag_tol * (1.0 + np.abs(t))
    out = t.real.copy()
    for row in np.flatnonzero(bad.any(axis=1)):
        merged = _merge_clusters(a[row], u[row], bad[row])
        if merged is None:
            worst = int(np.argmax(np.abs(t[row].imag)))
            raise NotHyperbolicAtPoint(
                f"restriction root {t[row, worst]:.6g} is not real", complex(t[row, worst]), X[row]
            )
        out[row] = merged * R[row]
    return -np.sort(-out, axis=1, kind="stable")


def real_roots_of(coefficients, imag_tol: float = IMAG_TOL) -> np.ndarray:
    """Real roots (non-increasing) of one ascending polynomial expected to be real-rooted."""
    c = np.trim_zeros(np.asarray(coefficients, dtype=float), "b")
    if len(c) <= 1:
        return np.zeros(0)
    R = 1.0 + np.max(np.abs(c[:-1] / c[-1]))  # Cauchy bound
    a = (c * R ** np.arange(len(c)))[None, :]
    u = aberth_polish(a, _companion_roots(a))
    return _real_roots(a, u, np.array([R]), c[None, :], imag_tol)[0]


# ---------------------------------------------------------------------------
# eigenvalues


def eigenvalues_batch(form: HyperbolicForm, X, method: str = "auto", imag_tol: float = IMAG_TOL) -> np.ndarray:
    """Eigenvalues (N, d), each row non-increasing.

    ``method`` is ``"auto"`` (closed form when the family has one),
    ``"generic"`` (always the restriction/root path) or ``"closed"``.
    """
    X = np.atleast_2d(_check_points(form, X))
    if method not in ("auto", "generic", "closed"):
        raise PreconditionError(f"unknown eigenvalue method {method!r}")
    if method != "generic":
        closed = form.closed_form_eigenvalues(X)
        if closed is not None:
            return closed
        if method == "closed":
            raise PreconditionError(f"family {form.family} has no closed-form eigenvalues")
    if len(X) == 0:
        return np.zeros((0, form.degree))
    a, R, u = _restriction_and_roots(form, X)
    roots, ok = _verified_roots(form, X, u * R[:, None])
    if not ok.all():
        roots[~ok] = _real_roots(a[~ok], u[~ok], R[~ok], X[~ok], imag_tol)
    return roots


def eigenvalues(form: HyperbolicForm, x, method: str = "auto", imag_tol: float = IMAG_TOL) -> Spectrum:
    x = _check_points(form, x)
    if x.ndim != 1:
        raise PreconditionError("eigenvalues takes a single point; use eigenvalues_batch")
    return Spectrum(eigenvalues_batch(form, x[None, :], method, imag_tol)[0])


# ---------------------------------------------------------------------------
# functionals; each accepts a Spectrum or raw values with eigenvalues on the last axis


def _values(spec) -> np.ndarray:
    return spec.values if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def spectral_norm(spec):
    vals = _values(spec)
    if vals.shape[-1] == 0:
        return _scalar(np.zeros(vals.shape[:-1]))
    return _scalar(np.max(np.abs(vals), axis=-1))


def hp_norm(spec, p: float):
    """l_p norm of the eigenvalue vector (p = inf gives the spectral norm)."""
    if not p >= 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    vals = np.abs(_values(spec))
    if np.isinf(p):
        return spectral_norm(vals)
    top = np.max(vals, axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    out = safe[..., 0] * np.sum((vals / safe) ** p, axis=-1) ** (1.0 / p)
    return _scalar(np.where(top[..., 0] > 0, out, 0.0))


def trace(spec):
    return _scalar(np.sum(_values(spec), axis=-1))


def rank(spec, tol: float = RANK_TOL) -> RankReport:
    if tol <= 0:
        raise PreconditionError("rank tolerance must be positive")
    vals = _values(spec)
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    return RankReport(int(np.sum(np.abs(vals) > tol * max(1.0, scale))), tol)


def rank_batch(values: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    scale = np.max(np.abs(values), axis=-1, keepdims=True)
    return np.sum(np.abs(values) > tol * np.maximum(1.0, scale), axis=-1)


def cone_position(spec, tol: float = CONE_TOL) -> str:
    """'interior', 'boundary' or 'outside' of the closed hyperbolic cone."""
    if tol < 0:
        raise PreconditionError("tol must be >= 0")
    vals = _values(spec)
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    lam_min = float(np.min(vals))
    margin = tol * max(1.0, scale)
    if lam_min > margin:
        return "interior"
    if lam_min < -margin:
        return "outside"
    return "boundary"


def elementary_symmetric_values(values) -> np.ndarray:
    """s_0..s_d of the given numbers (s_0 = 1), along the last axis."""
    vals = np.asarray(values, dtype=float)
    d = vals.shape[-1]
    E = np.zeros(vals.shape[:-1] + (d + 1,))
    E[..., 0] = 1.0
    for i in range(d):
        E[..., 1:] = E[..., 1:] + vals[..., i : i + 1] * E[..., :-1]
    return E


def symmetric_coefficients(form: HyperbolicForm, x) -> np.ndarray:
    """s_i(lambda(x)) for i = 0..d from derivatives of h at x in direction e."""
    x = _check_points(form, x)
    d = form.degree
    he = form.h_of_e()
    out = np.empty(d + 1)
    for i in range(d + 1):
        k = d - i
        out[i] = derivative_along(form, x, form.direction, k) / (factorial(k) * he)
    return out
