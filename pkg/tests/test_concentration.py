from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlab.concentration import (
    ConeSampleSpec,
    VectorSystem,
    chernoff_lower_bound,
    chernoff_upper_bound,
    cone_chernoff_experiment,
    exact_moment,
    exact_norms,
    exact_tail,
    expectation_bound,
    khinchin_ratio,
    m2q,
    mc_tail,
    moment_bound,
    multinomial_inequality_check,
    rademacher_value,
    tail_bound_rademacher,
    tightest_c2,
)
from hyperlab.errors import BudgetError, GeneratorContractError, PreconditionError
from hyperlab.forms import DeterminantSymmetric, LorentzQuadratic, Product
from hyperlab.generators import gaussian_vectors, rank_one_vectors, register_cone_generator, unit_norm_vectors
from hyperlab.spectra import eigenvalues_batch, hp_norm, spectral_norm


def brute_moment(sys, q):
    # independent oracle: plain loop over all 2^n sign patterns
    total = 0.0
    for signs in itertools.product([1.0, -1.0], repeat=sys.n):
        lam = eigenvalues_batch(sys.form, (np.array(signs) @ sys.vectors)[None, :])[0]
        total += np.sum(lam ** (2 * q))
    return (total / 2**sys.n) ** (1 / (2 * q))


def test_vector_system_cached_fields():
    sys = VectorSystem(Product(3), [[1, 0, 0], [0, 2, 0]])
    assert sys.sigma == pytest.approx(math.sqrt(5)) and sys.max_rank == 1 and sys.n == 2


def test_rademacher_examples():
    f = Product(3)
    x = [0.3, -1.2, 2.0]
    sys1 = VectorSystem(f, [x])
    assert rademacher_value(sys1, [1]) == rademacher_value(sys1, [-1]) == pytest.approx(2.0)
    dup = VectorSystem(f, [x, x])
    for p in (1, 2, math.inf):
        assert rademacher_value(dup, [1, -1], p) == 0
    assert rademacher_value(VectorSystem(f, [[1, 0, 0], [1, 0, 0]]), [1, 1], 2) == pytest.approx(2)


def test_exact_moment_examples():
    f = Product(3)
    assert exact_moment(VectorSystem(f, [[1, 0, 0], [1, 0, 0]]), 1) == pytest.approx(math.sqrt(2))
    assert exact_moment(VectorSystem(f, [[1, 0, 0], [0, 1, 0]]), 1) == pytest.approx(math.sqrt(2))
    x = np.array([1.0, -2.0, 0.5])
    assert exact_moment(VectorSystem(f, [x]), 2) == pytest.approx(hp_norm(x, 4))
    with pytest.raises(BudgetError):
        exact_moment(VectorSystem(f, np.ones((25, 3))), 1)


@pytest.mark.parametrize("form", [Product(3), LorentzQuadratic(3), DeterminantSymmetric(2)], ids=repr)
def test_exact_moment_matches_brute_force(form, rng):
    sys = VectorSystem(form, rng.standard_normal((6, form.dimension)))
    for q in (1, 2, 3):
        assert exact_moment(sys, q) == pytest.approx(brute_moment(sys, q), rel=1e-10)


def test_moment_and_expectation_bounds():
    assert moment_bound(1, 1, 1) == 1
    assert moment_bound(1, 4, 2) == pytest.approx(math.sqrt(3) * 4**0.25)
    assert moment_bound(2, 1, 1) == 2
    assert expectation_bound(1, 1) == (1.0, 1)
    assert expectation_bound(1, 4) == (pytest.approx(2.0), 1)
    val, q = expectation_bound(1, 16)
    assert q == 2 and val == pytest.approx(math.sqrt(3) * 2)


def test_tail_bound_examples():
    assert tail_bound_rademacher(1e-9, 1.0) == 1.0
    t = math.sqrt(32 * math.log(2))
    assert tail_bound_rademacher(t, 1.0) == pytest.approx(1.0)
    assert tail_bound_rademacher(8, 1) == pytest.approx(2 * math.exp(-2))


def test_khinchin_examples():
    f = Product(3)
    assert khinchin_ratio(VectorSystem(f, [[1, 2, 3]])) == pytest.approx(1.0)
    assert khinchin_ratio(VectorSystem(f, [[1, 0, 0], [1, 0, 0]])) == pytest.approx(math.sqrt(2))
    with pytest.raises(PreconditionError):
        khinchin_ratio(VectorSystem(f, np.zeros((2, 3))))


def test_m2q_examples_and_fact():
    assert m2q(1) == pytest.approx(1.0, abs=1e-12)
    assert m2q(2) == pytest.approx(3**0.25)
    assert m2q(3) == pytest.approx(15 ** (1 / 6))
    assert all(m2q(q) <= math.sqrt(2 * q - 1) for q in range(1, 81))


def test_multinomial_examples():
    assert multinomial_inequality_check(2, [1, 1]) == (6.0, pytest.approx(6.0))
    assert multinomial_inequality_check(1, [1]) == (1.0, pytest.approx(1.0))
    assert multinomial_inequality_check(2, [2, 0]) == (1.0, pytest.approx(3.0))
    with pytest.raises(PreconditionError):
        multinomial_inequality_check(3, [1, 1])


def test_mc_tail_examples():
    f = Product(4)
    single = VectorSystem(f, [[1, 2, 0, 0]])
    assert mc_tail(single, 0.0, 200, seed=1).p_hat == 1.0
    sys = VectorSystem(f, unit_norm_vectors(f, 6, np.random.default_rng(0)))
    assert mc_tail(sys, float(np.sum(sys.norms)), 500, seed=1).p_hat == 0.0
    with pytest.raises(PreconditionError):
        mc_tail(sys, 1.0, 99, seed=1)


def test_mc_tail_brackets_exact_percentile():
    f = Product(4)
    sys = VectorSystem(f, unit_norm_vectors(f, 12, np.random.default_rng(11)))
    norms = np.sort(exact_norms(sys))
    # midpoint between distinct values so rounding cannot move patterns across t
    j = int(0.9 * len(norms))
    while norms[j + 1] - norms[j] < 1e-9:
        j += 1
    t = float(0.5 * (norms[j] + norms[j + 1]))
    exact = exact_tail(sys, t, norms)
    est = mc_tail(sys, t, 50000, seed=5)
    assert 0.08 <= est.p_hat <= 0.12
    assert est.ci_low <= exact.p_hat <= est.ci_high


def test_mc_tail_independent_of_threads():
    f = DeterminantSymmetric(3)
    sys = VectorSystem(f, gaussian_vectors(f, 8, np.random.default_rng(2)))
    a = mc_tail(sys, 3.0, 5000, seed=9, threads=1)
    b = mc_tail(sys, 3.0, 5000, seed=9, threads=8)
    assert a == b


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["product", "det"]))
def test_moment_oracle_property(seed, fam):
    rng = np.random.default_rng(seed)
    form = Product(4) if fam == "product" else DeterminantSymmetric(3)
    n = int(rng.integers(1, 9))
    vecs = rank_one_vectors(form, n, rng) if rng.random() < 0.5 else gaussian_vectors(form, n, rng)
    sys = VectorSystem(form, vecs)
    s = max(1, sys.max_rank)
    for q in (1, 2, 3):
        assert exact_moment(sys, q) <= moment_bound(sys.sigma, s, q) * (1 + 1e-10)
    norms = exact_norms(sys)
    assert np.mean(norms) <= expectation_bound(sys.sigma, s)[0] * (1 + 1e-10)
    m2 = float(np.mean(norms**2))
    for t in np.linspace(0.05, 1, 10) * np.sum(sys.norms):
        assert np.mean(norms > t) <= tail_bound_rademacher(t, m2) + 1e-12
    r = khinchin_ratio(sys)
    assert 1 - 1e-12 <= r <= math.sqrt(2) + 1e-9


def test_tightest_c2_is_admissible(rng):
    f = Product(3)
    sys = VectorSystem(f, gaussian_vectors(f, 8, rng))
    norms = exact_norms(sys)
    grid = np.linspace(0.1, 1, 20) * np.sum(sys.norms)
    c2 = tightest_c2(norms, sys.sigma, sys.max_rank, grid)
    scale = sys.sigma**2 * math.log(sys.max_rank + 1)
    for t in grid:
        assert np.mean(norms > t) <= 2 * math.exp(-c2 * t * t / scale) * (1 + 1e-12)


def test_chernoff_bound_closed_forms():
    assert chernoff_upper_bound(4, 10, 1, 0) == 1.0
    expected = 3 * ((1.5**1.5) / math.exp(0.5)) ** (-20 / 0.5)
    assert chernoff_upper_bound(3, 20, 0.5, 0.5) == pytest.approx(expected)
    expected = 3 * ((0.5**0.5) / math.exp(-0.5)) ** (-20 / 0.5)
    assert chernoff_lower_bound(3, 20, 0.5, 0.5) == pytest.approx(expected)
    with pytest.raises(PreconditionError):
        chernoff_lower_bound(3, 1, 1, 1.5)


def test_cone_chernoff_point_mass():
    spec = ConeSampleSpec(Product(3), 10, "constant_direction", 0.1)
    res = cone_chernoff_experiment(spec, 0.1, 200, seed=3)
    assert res.mu_max == pytest.approx(1.0) and res.max_tail.p_hat == 0.0


def test_cone_chernoff_example():
    spec = ConeSampleSpec(Product(4), 50, "uniform_box", 0.2)
    res = cone_chernoff_experiment(spec, 0.5, 5000, seed=7)
    assert res.max_tail.p_hat <= res.bound_max + res.max_tail.slack
    assert cone_chernoff_experiment(spec, 0.0, 100, seed=7).bound_max == 1.0


def test_cone_chernoff_reproducible_across_threads():
    spec = ConeSampleSpec(DeterminantSymmetric(3), 20, "uniform_box", 0.5)
    a = cone_chernoff_experiment(spec, 0.3, 1000, seed=4, threads=1)
    b = cone_chernoff_experiment(spec, 0.3, 1000, seed=4, threads=8)
    assert a == b


def test_generator_contract_violation():
    def leaky(form, n, R, rng):
        return np.tile(2 * R * form.direction, (n, 1))

    register_cone_generator("test_leaky", leaky)
    with pytest.raises(GeneratorContractError):
        cone_chernoff_experiment(ConeSampleSpec(Product(2), 3, "test_leaky", 1.0), 0.5, 100, seed=0)
    with pytest.raises(PreconditionError):
        register_cone_generator("test_leaky", leaky)
