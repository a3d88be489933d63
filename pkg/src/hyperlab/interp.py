"""Newton divided differences and monomial conversion on fixed node sets."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def divided_differences(nodes, values) -> np.ndarray:
    """Newton coefficients of the interpolant through ``(nodes, values)``.

    ``values`` may carry trailing batch axes; interpolation runs along axis 0.
    """
    nodes = np.asarray(nodes, dtype=float)
    coef = np.array(values, dtype=float, copy=True)
    n = len(nodes)
    for j in range(1, n):
        denom = nodes[j:] - nodes[: n - j]
        denom = denom.reshape((-1,) + (1,) * (coef.ndim - 1))
        coef[j:] = (coef[j:] - coef[j - 1 : n - 1]) / denom
    return coef


def newton_to_monomial(nodes, newton) -> np.ndarray:
    """Convert Newton-form coefficients to ascending monomial coefficients."""
    nodes = np.asarray(nodes, dtype=float)
    newton = np.asarray(newton, dtype=float)
    n = len(nodes)
    mono = np.zeros_like(newton)
    # Horner on the Newton basis: p = a_{n-1}; p = p*(t - x_j) + a_j
    mono[0] = newton[n - 1]
    for j in range(n - 2, -1, -1):
        shifted = np.zeros_like(mono)
        shifted[1:] = mono[:-1]
        mono = shifted - nodes[j] * mono
        mono[0] = mono[0] + newton[j]
    return mono


def interpolate_monomial(nodes, values) -> np.ndarray:
    """Ascending monomial coefficients of the degree ``len(nodes)-1`` interpolant."""
    return newton_to_monomial(nodes, divided_differences(nodes, values))


@lru_cache(maxsize=None)
def _monomial_matrix(key: tuple[float, ...]) -> np.ndarray:
    nodes = np.array(key)
    mat = interpolate_monomial(nodes, np.eye(len(nodes)))
    mat.setflags(write=False)
    return mat


def monomial_matrix(nodes) -> np.ndarray:
    """Matrix ``W`` with ``coefficients = W @ values`` for the given nodes (cached)."""
    return _monomial_matrix(tuple(float(t) for t in nodes))


def chebyshev_nodes(count: int) -> np.ndarray:
    """Chebyshev points of the first kind on [-1, 1], descending."""
    k = np.arange(count)
    return np.cos((2 * k + 1) * np.pi / (2 * count))


def integer_nodes(count: int) -> np.ndarray:
    return np.arange(count, dtype=float)
