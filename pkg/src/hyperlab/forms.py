"""Hyperbolic polynomial families and their evaluation.

Every family is a homogeneous polynomial ``h`` on R^m of degree ``d`` together
with a hyperbolic direction ``e``.  Forms are immutable; all evaluation entry
points accept either a single point of shape ``(m,)`` or a batch ``(N, m)``.

Packed symmetric storage (``DeterminantSymmetric``) keeps the lower triangle
row by row: ``X[0,0], X[1,0], X[1,1], X[2,0], ...``; off-diagonal entries are
stored once and mirrored on unpacking.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Sequence

import numpy as np

from .errors import DimensionError, PreconditionError
from .interp import integer_nodes, monomial_matrix


# ---------------------------------------------------------------------------
# packed symmetric matrices


def packed_size(d: int) -> int:
    return d * (d + 1) // 2


def _tril_indices(d: int):
    rows, cols = [], []
    for i in range(d):
        for j in range(i + 1):
            rows.append(i)
            cols.append(j)
    return np.array(rows), np.array(cols)


def pack_symmetric(mat) -> np.ndarray:
    """Pack a symmetric ``(..., d, d)`` array into ``(..., d(d+1)/2)``."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[-1]
    rows, cols = _tril_indices(d)
    return mat[..., rows, cols]


def unpack_symmetric(packed, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`pack_symmetric`."""
    packed = np.asarray(packed, dtype=float)
    if d is None:
        d = int(round((math.isqrt(8 * packed.shape[-1] + 1) - 1) / 2))
    if packed.shape[-1] != packed_size(d):
        raise DimensionError(f"packed length {packed.shape[-1]} is not d(d+1)/2 for d={d}")
    rows, cols = _tril_indices(d)
    out = np.zeros(packed.shape[:-1] + (d, d))
    out[..., rows, cols] = packed
    out[..., cols, rows] = packed
    return out


# ---------------------------------------------------------------------------
# families


class HyperbolicForm:
    """Base class; subclasses define ``_evaluate_batch`` and metadata."""

    family: str
    degree: int
    dimension: int
    direction: np.ndarray

    def _evaluate_batch(self, X: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def closed_form_eigenvalues(self, X: np.ndarray) -> np.ndarray | None:
        """Eigenvalues (N, d) sorted non-increasing, or None when no closed form exists."""
        return None

    @property
    def regular_cone(self) -> bool:
        return False

    def h_of_e(self) -> float:
        return float(self._evaluate_batch(self.direction[None, :])[0])

    def describe(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, HyperbolicForm) and self.describe() == other.describe()

    def __hash__(self) -> int:
        return hash(json.dumps(self.describe(), sort_keys=True))


def _as_direction(direction, m: int) -> np.ndarray:
    e = np.array(direction, dtype=float)
    if e.shape != (m,):
        raise DimensionError(f"direction has shape {e.shape}, expected ({m},)")
    if not np.all(np.isfinite(e)):
        raise PreconditionError("direction must be finite")
    e.setflags(write=False)
    return e


class Product(HyperbolicForm):
    """h(x) = x_1 x_2 ... x_m, hyperbolic for any strictly positive direction."""

    family = "product"

    def __init__(self, m: int, direction: Sequence[float] | None = None):
        if m < 1:
            raise PreconditionError("Product needs m >= 1")
        self.dimension = self.degree = int(m)
        e = np.ones(m) if direction is None else direction
        self.direction = _as_direction(e, m)
        if np.any(self.direction <= 0):
            raise PreconditionError("Product direction must be strictly positive")

    @property
    def regular_cone(self) -> bool:
        return True

    def _evaluate_batch(self, X):
        return np.prod(X, axis=-1)

    def closed_form_eigenvalues(self, X):
        return -np.sort(-(X / self.direction), axis=-1)

    def describe(self):
        return {"type": "product", "m": self.dimension, "e": self.direction.tolist()}


class LorentzQuadratic(HyperbolicForm):
    """h(x) = x_1^2 - x_2^2 - ... - x_m^2 with direction the first basis vector."""

    family = "lorentz"

    def __init__(self, m: int):
        if m < 2:
            raise PreconditionError("LorentzQuadratic needs m >= 2")
        self.dimension = int(m)
        self.degree = 2
        e = np.zeros(m)
        e[0] = 1.0
        self.direction = _as_direction(e, m)

    @property
    def regular_cone(self) -> bool:
        return True

    def _evaluate_batch(self, X):
        return X[..., 0] ** 2 - np.sum(X[..., 1:] ** 2, axis=-1)

    def closed_form_eigenvalues(self, X):
        radius = np.linalg.norm(X[..., 1:], axis=-1)
        return np.stack([X[..., 0] + radius, X[..., 0] - radius], axis=-1)

    def describe(self):
        return {"type": "lorentz", "m": self.dimension}


class DeterminantSymmetric(HyperbolicForm):
    """h(X) = det(X) on packed symmetric d x d matrices, direction the packed identity."""

    family = "det_symmetric"

    def __init__(self, d: int):
        if d < 1:
            raise PreconditionError("DeterminantSymmetric needs d >= 1")
        self.degree = int(d)
        self.dimension = packed_size(d)
        self.direction = _as_direction(pack_symmetric(np.eye(d)), self.dimension)

    @property
    def regular_cone(self) -> bool:
        return True

    def _evaluate_batch(self, X):
        return np.linalg.det(unpack_symmetric(X, self.degree))

    def closed_form_eigenvalues(self, X):
        return np.linalg.eigvalsh(unpack_symmetric(X, self.degree))[..., ::-1]

    def describe(self):
        return {"type": "det_symmetric", "d": self.degree}


class ElementarySymmetric(HyperbolicForm):
    """h(x) = e_k(x_1, ..., x_m), hyperbolic with respect to the all-ones vector."""

    family = "elementary_symmetric"

    def __init__(self, m: int, k: int):
        if not 1 <= k <= m:
            raise PreconditionError("ElementarySymmetric needs 1 <= k <= m")
        self.dimension = int(m)
        self.degree = int(k)
        self.direction = _as_direction(np.ones(m), m)

    @property
    def regular_cone(self) -> bool:
        # e_1 has a half-space cone; k >= 2 cones contain no lines
        return self.degree >= 2

    def _evaluate_batch(self, X):
        k = self.degree
        E = np.zeros(X.shape[:-1] + (k + 1,))
        E[..., 0] = 1.0
        for i in range(X.shape[-1]):
            xi = X[..., i : i + 1]
            E[..., 1:] = E[..., 1:] + xi * E[..., :-1]
        return E[..., k]

    def describe(self):
        return {"type": "elementary_symmetric", "m": self.dimension, "k": self.degree}


class DenseHomogeneous(HyperbolicForm):
    """A homogeneous polynomial given as a term list.

    Terms are canonicalised: sorted lexicographically by exponent vector,
    duplicates merged and zero coefficients dropped.  Hyperbolicity is not
    checked at construction; use :func:`check_hyperbolicity`.
    """

    family = "dense"

    def __init__(self, m: int, d: int, terms, direction: Sequence[float]):
        self.dimension = int(m)
        self.degree = int(d)
        self.direction = _as_direction(direction, m)
        merged: dict[tuple[int, ...], float] = {}
        for exp, coef in terms:
            exp = tuple(int(a) for a in exp)
            if len(exp) != m:
                raise DimensionError(f"exponent {exp} has length {len(exp)}, expected {m}")
            if any(a < 0 for a in exp):
                raise PreconditionError(f"negative exponent in {exp}")
            if sum(exp) != d:
                raise PreconditionError(f"term {exp} has total degree {sum(exp)}, expected {d}")
            merged[exp] = merged.get(exp, 0.0) + float(coef)
        items = sorted((e, c) for e, c in merged.items() if c != 0.0)
        if not items:
            raise PreconditionError("dense form has no nonzero terms")
        self.exponents = np.array([e for e, _ in items], dtype=np.int64)
        self.coefficients = np.array([c for _, c in items])
        self.exponents.setflags(write=False)
        self.coefficients.setflags(write=False)

    @property
    def terms(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(int(a) for a in e), float(c)) for e, c in zip(self.exponents, self.coefficients)]

    def _evaluate_batch(self, X):
        powers = X[..., None, :] ** self.exponents
        return np.prod(powers, axis=-1) @ self.coefficients

    def describe(self):
        return {
            "type": "dense",
            "m": self.dimension,
            "d": self.degree,
            "e": self.direction.tolist(),
            "terms": [{"exp": list(e), "coef": c} for e, c in self.terms],
        }

    def to_json(self) -> str:
        payload = self.describe()
        payload.pop("type")
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str | dict) -> "DenseHomogeneous":
        data = json.loads(text) if isinstance(text, str) else text
        return cls(
            data["m"],
            data["d"],
            [(t["exp"], t["coef"]) for t in data["terms"]],
            data["e"],
        )


def form_from_descriptor(desc: dict) -> HyperbolicForm:
    """Build a form from its :meth:`HyperbolicForm.describe` dictionary."""
    kind = desc.get("type")
    if kind == "product":
        return Product(desc["m"], desc.get("e"))
    if kind == "lorentz":
        return LorentzQuadratic(desc["m"])
    if kind == "det_symmetric":
        return DeterminantSymmetric(desc["d"])
    if kind == "elementary_symmetric":
        return ElementarySymmetric(desc["m"], desc["k"])
    if kind == "dense":
        return DenseHomogeneous.from_json(desc)
    raise PreconditionError(f"unknown family type {kind!r}")


# ---------------------------------------------------------------------------
# evaluation


def _check_points(form: HyperbolicForm, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != form.dimension:
        raise DimensionError(
            f"point has trailing dimension {arr.shape[-1] if arr.ndim else 0}, "
            f"form {form.family} expects {form.dimension}"
        )
    return arr


def evaluate(form: HyperbolicForm, x) -> float | np.ndarray:
    """h(x) for a point ``(m,)`` (returns float) or a batch ``(N, m)``."""
    arr = _check_points(form, x)
    if arr.ndim == 1:
        return float(form._evaluate_batch(arr[None, :])[0])
    return form._evaluate_batch(arr)


def _group_directions(directions: np.ndarray):
    """Collapse repeated directions into (unique direction, multiplicity) pairs."""
    groups: list[list] = []
    for v in directions:
        for g in groups:
            if np.array_equal(g[0], v):
                g[1] += 1
                break
        else:
            groups.append([v, 1])
    return [(g[0], g[1]) for g in groups]


def directional_derivative(form: HyperbolicForm, x, directions) -> float:
    """Composed derivative D_{v_1} ... D_{v_k} h at ``x``.

    The restriction ``h(x + sum_j t_j u_j)`` over the distinct directions
    ``u_j`` (multiplicity ``a_j``) is sampled on the grid {0..d}^r and the
    coefficient of ``prod t_j^{a_j}`` is read off by tensor interpolation; the
    derivative is that coefficient times ``prod a_j!``.
    """
    x = _check_points(form, x)
    if x.ndim != 1:
        raise DimensionError("directional_derivative takes a single point")
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    if dirs.size == 0:
        raise PreconditionError("directions must be nonempty")
    if dirs.shape[-1] != form.dimension:
        raise DimensionError("direction dimension mismatch")
    d = form.degree
    if len(dirs) > d:
        return 0.0
    return _derivative_from_groups(form, x, _group_directions(dirs))


def _derivative_from_groups(form, x, groups) -> float:
    d = form.degree
    nodes = integer_nodes(d + 1)
    W = monomial_matrix(nodes)
    U = np.array([u for u, _ in groups])
    r = len(groups)
    grid = np.array(list(itertools.product(nodes, repeat=r)))  # ((d+1)^r, r)
    pts = x[None, :] + grid @ U
    vals = form._evaluate_batch(pts).reshape((d + 1,) * r)
    scale = 1.0
    for axis, (_, mult) in enumerate(groups):
        # contract axis with the row of W extracting the t^mult coefficient
        vals = np.tensordot(W[mult], vals, axes=([0], [0]))
        scale *= factorial(mult)
    return float(vals) * scale


def derivative_along(form: HyperbolicForm, x, v, order: int) -> float:
    """D_v^order h(x) (order 0 returns h(x))."""
    x = _check_points(form, x)
    if order == 0:
        return evaluate(form, x)
    if order > form.degree:
        return 0.0
    return _derivative_from_groups(form, x, [(np.asarray(v, dtype=float), order)])


# ---------------------------------------------------------------------------
# hyperbolicity check


@dataclass(frozen=True)
class HyperbolicityReport:
    lines_tested: int
    max_imaginary_residual: float
    verdict: str
    worst_line: tuple[np.ndarray, np.ndarray] | None
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def check_hyperbolicity(form: HyperbolicForm, trials: int, seed: int, tol: float = 1e-8) -> HyperbolicityReport:
    """Sample Gaussian points and measure how far the restriction roots leave the real line."""
    from .spectra import restriction_roots

    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if form.h_of_e() == 0.0:
        raise PreconditionError("h(e) = 0: direction cannot be hyperbolic")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((trials, form.dimension))
    roots = restriction_roots(form, X)
    resid = np.abs(roots.imag) / (1.0 + np.abs(roots))
    per_line = resid.max(axis=1)
    worst = int(np.argmax(per_line))
    max_res = float(per_line[worst])
    verdict = "pass" if max_res <= tol else "fail"
    worst_line = (form.direction.copy(), X[worst].copy())
    return HyperbolicityReport(trials, max_res, verdict, worst_line, tol)


def binomial_row(d: int) -> np.ndarray:
    return np.array([comb(d, i) for i in range(d + 1)], dtype=float)
