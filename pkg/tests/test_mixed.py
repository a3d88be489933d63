from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlab.errors import BudgetError, PreconditionError
from hyperlab.forms import DeterminantSymmetric, ElementarySymmetric, Product, directional_derivative
from hyperlab.generators import scaled_rank_one, uniform_box
from hyperlab.mixed import (
    DeltaQuery,
    closed_form_delta_inf,
    delta_bound,
    feasible,
    lambda_max_mixed,
    mixed_restriction,
    solve_delta_bound,
)
from hyperlab.spectra import eigenvalues, eigenvalues_batch, rank_batch, trace


def test_mixed_restriction_examples():
    f = Product(3)
    np.testing.assert_allclose(mixed_restriction(f, np.zeros((0, 3))).coefficients, [0, 0, 0, 1])
    np.testing.assert_allclose(mixed_restriction(f, [[1, 0, 0]]).coefficients, [0, 0, -1, 1], atol=1e-12)
    np.testing.assert_allclose(mixed_restriction(f, [[0, 0, 0]]).coefficients, [0, 0, 0, 1], atol=1e-12)


def test_lambda_max_mixed_examples():
    f = Product(3)
    assert lambda_max_mixed(f, [[1, 0, 0]]) == pytest.approx(1.0)
    assert lambda_max_mixed(f, np.zeros((0, 3))) == 0.0
    vs = np.tile(f.direction / 3, (3, 1))
    assert lambda_max_mixed(f, vs) >= eigenvalues(f, vs.sum(axis=0)).lambda_max - 1e-9


def test_mixed_preconditions():
    f = Product(2)
    with pytest.raises(BudgetError):
        mixed_restriction(f, np.ones((13, 2)))
    with pytest.raises(PreconditionError):
        mixed_restriction(f, [[1, -1]])


def test_mixed_matches_subset_interpolation_oracle(rng):
    # oracle: each subset term as a polynomial in t from d+1 samples of D_{v_S} h(t e)
    f = DeterminantSymmetric(3)
    vs = uniform_box(f, 3, 1.0, rng)
    d = f.degree
    ts = np.arange(d + 1, dtype=float)
    total = np.zeros(d + 1)
    for mask in range(1 << len(vs)):
        S = [i for i in range(len(vs)) if mask >> i & 1]
        if S:
            vals = [directional_derivative(f, t * f.direction, vs[S]) for t in ts]
        else:
            vals = [np.linalg.det(np.eye(3)) * t**3 for t in ts]
        total += (-1) ** len(S) * np.polynomial.polynomial.polyfit(ts, vals, d)
    np.testing.assert_allclose(mixed_restriction(f, vs).coefficients, total, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["product", "det"]), st.booleans())
def test_sum_root_bound_property(seed, fam, rank_one):
    rng = np.random.default_rng(seed)
    form = Product(4) if fam == "product" else DeterminantSymmetric(3)
    gen = scaled_rank_one if rank_one else uniform_box
    vs = gen(form, int(rng.integers(1, 7)), 1.0, rng)
    tot = eigenvalues(form, vs.sum(axis=0))
    assert tot.lambda_max <= lambda_max_mixed(form, vs) + 1e-7 * max(1.0, tot.scale)


def test_trace_identity(rng):
    for form in (Product(4), DeterminantSymmetric(3), ElementarySymmetric(5, 3)):
        for v in rng.standard_normal((30, form.dimension)):
            tr = trace(eigenvalues(form, v))
            dd = directional_derivative(form, form.direction, [v]) / form.h_of_e()
            assert abs(tr - dd) <= 1e-8 * (1 + abs(tr))


def test_delta_closed_forms():
    assert delta_bound(DeltaQuery(1.0)) == pytest.approx(4.0, abs=1e-4)
    assert delta_bound(DeltaQuery(0.25)) == pytest.approx(2.25, abs=1e-4)
    assert closed_form_delta_inf(0.25) == 2.25
    res = solve_delta_bound(DeltaQuery(1.0))
    assert res.grid_value >= res.value and res.grid_log_step > 0


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0, 3.0])
def test_single_vector_value_is_eps(eps):
    assert delta_bound(DeltaQuery(eps, 1, 3)) == pytest.approx(eps, rel=1e-9)


@pytest.mark.parametrize("eps", [0.1, 0.7, 2.0])
@pytest.mark.parametrize("r", [1, 2, 5, math.inf])
def test_finite_parameters_below_limit(eps, r):
    for n in (2, 5, 40):
        assert delta_bound(DeltaQuery(eps, n, r)) <= closed_form_delta_inf(eps) + 1e-4


@pytest.mark.parametrize("r", [2, 4, math.inf])
def test_delta_non_decreasing_in_n(r):
    vals = [delta_bound(DeltaQuery(0.5, n, r)) for n in (1, 2, 4, 8, 16, 64, math.inf)]
    assert all(a <= b * (1 + 1e-9) for a, b in zip(vals, vals[1:]))


def test_large_r_proxy_matches_limit():
    assert delta_bound(DeltaQuery(1.0, math.inf, 10**6)) == pytest.approx(4.0, abs=1e-4)


def test_feasible_region_side_conditions():
    # boundary mu = 1 is excluded when r is infinite
    assert not feasible(2.0, 1.0, math.inf)
    assert feasible(2.0, 2.0, math.inf)
    assert not feasible(0.5, 2.0, math.inf)


def test_query_validation():
    with pytest.raises(PreconditionError):
        DeltaQuery(0.0)
    with pytest.raises(PreconditionError):
        DeltaQuery(1.0, 0.5)


def test_mixed_root_bound_on_conforming_instances(rng):
    for form in (Product(3), DeterminantSymmetric(3)):
        for _ in range(10):
            vs = uniform_box(form, int(rng.integers(1, 6)), 1.0, rng)
            eig = eigenvalues_batch(form, vs)
            tot = eigenvalues(form, vs.sum(axis=0))
            eps, sigma, r = eig.sum(axis=1).max(), tot.scale, int(rank_batch(eig).max())
            bound = sigma * delta_bound(DeltaQuery(eps / sigma, len(vs), r))
            assert lambda_max_mixed(form, vs) <= bound * (1 + 1e-6)
