"""Random vector generators for each family: Gaussian, rank-one, unit-norm, and cone samples.

Cone generators return vectors in the closed hyperbolic cone with
``lambda_max <= R``; they are the sample sources for the cone Chernoff suite.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import PreconditionError
from .forms import (
    DeterminantSymmetric,
    ElementarySymmetric,
    HyperbolicForm,
    LorentzQuadratic,
    Product,
    pack_symmetric,
)
from .spectra import eigenvalues_batch, spectral_norm


def _unit_vectors(rng, count, dim):
    u = rng.standard_normal((count, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _haar_orthogonal(rng, count, d):
    Z = rng.standard_normal((count, d, d))
    Q, Rm = np.linalg.qr(Z)
    return Q * np.sign(np.diagonal(Rm, axis1=1, axis2=2))[:, None, :]


def gaussian_vectors(form: HyperbolicForm, n: int, rng) -> np.ndarray:
    return rng.standard_normal((n, form.dimension))


def rank_one_vectors(form: HyperbolicForm, n: int, rng, magnitudes=None) -> np.ndarray:
    """Vectors of hyperbolic rank one with the given (default Gaussian) nonzero eigenvalue."""
    a = rng.standard_normal(n) if magnitudes is None else np.asarray(magnitudes, dtype=float)
    if isinstance(form, Product):
        out = np.zeros((n, form.dimension))
        j = rng.integers(0, form.dimension, n)
        out[np.arange(n), j] = a * form.direction[j]
        return out
    if isinstance(form, DeterminantSymmetric):
        u = _unit_vectors(rng, n, form.degree)
        return pack_symmetric(a[:, None, None] * u[:, :, None] * u[:, None, :])
    if isinstance(form, LorentzQuadratic):
        w = _unit_vectors(rng, n, form.dimension - 1)
        return np.hstack([a[:, None] / 2, (a[:, None] / 2) * w])
    if isinstance(form, ElementarySymmetric):
        out = np.zeros((n, form.dimension))
        j = rng.integers(0, form.dimension, n)
        out[np.arange(n), j] = a * form.dimension / form.degree
        return out
    raise PreconditionError(f"no rank-one generator for family {form.family}")


def unit_norm_vectors(form: HyperbolicForm, n: int, rng) -> np.ndarray:
    X = gaussian_vectors(form, n, rng)
    norms = spectral_norm(eigenvalues_batch(form, X))
    return X / norms[:, None]


VECTOR_GENERATORS: dict[str, Callable] = {
    "gaussian": gaussian_vectors,
    "rank_one": rank_one_vectors,
    "unit_norm": unit_norm_vectors,
}


# ---------------------------------------------------------------------------
# cone samples with lambda_max <= R


def _cone_from_eigenvalues(form: HyperbolicForm, lam: np.ndarray, rng) -> np.ndarray:
    """A vector with prescribed eigenvalues (rows of ``lam``, any order)."""
    n = len(lam)
    if isinstance(form, Product):
        return lam * form.direction
    if isinstance(form, DeterminantSymmetric):
        Q = _haar_orthogonal(rng, n, form.degree)
        return pack_symmetric(np.einsum("nij,nj,nkj->nik", Q, lam, Q))
    if isinstance(form, LorentzQuadratic):
        hi, lo = lam.max(axis=1), lam.min(axis=1)
        w = _unit_vectors(rng, n, form.dimension - 1)
        return np.hstack([(hi + lo)[:, None] / 2, ((hi - lo)[:, None] / 2) * w])
    raise PreconditionError(f"no cone generator for family {form.family}")


def uniform_box(form, n, R, rng):
    return _cone_from_eigenvalues(form, rng.uniform(0.0, R, (n, form.degree)), rng)


def half_band(form, n, R, rng):
    """Eigenvalues uniform on [R/2, R]: lambda_min is bounded away from zero."""
    return _cone_from_eigenvalues(form, rng.uniform(0.5 * R, R, (n, form.degree)), rng)


def scaled_rank_one(form, n, R, rng):
    if isinstance(form, (Product, DeterminantSymmetric, LorentzQuadratic)):
        return rank_one_vectors(form, n, rng, rng.uniform(0.0, R, n))
    raise PreconditionError(f"no cone generator for family {form.family}")


def scaled_direction(form, n, R, rng):
    return rng.uniform(0.0, R, n)[:, None] * form.direction


def constant_direction(form, n, R, rng):
    return np.tile(R * form.direction, (n, 1))


CONE_GENERATORS: dict[str, Callable] = {
    "uniform_box": uniform_box,
    "half_band": half_band,
    "scaled_rank_one": scaled_rank_one,
    "scaled_direction": scaled_direction,
    "constant_direction": constant_direction,
}


def register_cone_generator(name: str, fn: Callable) -> None:
    """Register ``fn(form, n, R, rng) -> (n, m)`` under ``name`` for ConeSampleSpec."""
    if name in CONE_GENERATORS:
        raise PreconditionError(f"cone generator {name!r} already registered")
    CONE_GENERATORS[name] = fn


def cone_vectors(form: HyperbolicForm, n: int, rng, kind: str = "uniform_box", R: float = 1.0) -> np.ndarray:
    try:
        gen = CONE_GENERATORS[kind]
    except KeyError:
        raise PreconditionError(f"unknown cone generator {kind!r}") from None
    return gen(form, n, R, rng)
