from __future__ import annotations

import math

import numpy as np
import pytest

from hyperlab.anticoncentration import (
    BucketHash,
    ConePair,
    alpha_fraction,
    boundary_measure,
    bucket_lemma_experiment,
    exact_interval_probability,
    good_bucket_fraction,
    interval_probability,
    lemma_bucket_minimum,
    max_pair_distance,
    min_pair_distance,
    random_bucket_hash,
)
from hyperlab.errors import PreconditionError
from hyperlab.forms import DeterminantSymmetric, Product
from hyperlab.generators import half_band, uniform_box


def make_pair(form, n, tau, seed):
    rng = np.random.default_rng(seed)
    xs = half_band(form, n, tau, rng)
    return ConePair(form, form, xs, -uniform_box(form, n, tau, rng), tau)


def test_pair_validation():
    f = Product(2)
    with pytest.raises(PreconditionError):
        ConePair(f, f, [[1.0, 0.5]], [[-0.1, -0.1]], tau=0.5)  # lambda_max above tau
    with pytest.raises(PreconditionError):
        ConePair(f, f, [[0.1, 0.1]], [[0.1, -0.1]], tau=0.5)  # second family not in -cone
    with pytest.raises(PreconditionError):
        ConePair(f, f, [[0.1, 0.1]], [[-0.1, -0.1]], tau=0.5, require_mass=True)


def test_interval_probability_extremes():
    pair = make_pair(Product(3), 10, 0.3, seed=1)
    big = max_pair_distance(pair)
    assert interval_probability(pair, big + 1e-9, 2000, seed=2).p_hat == 1.0
    small = min_pair_distance(pair)
    assert interval_probability(pair, small * 0.999, 2000, seed=2).p_hat == 0.0
    with pytest.raises(PreconditionError):
        interval_probability(pair, 0.1, 999, seed=2)


def test_single_vector_two_patterns():
    f = Product(2)
    pair = ConePair(f, f, [[0.4, 0.2]], [[-0.1, -0.3]], tau=0.5, y1=[0.4, 0.2], y2=[5.0, 5.0])
    # pattern +1 hits y1 exactly; pattern -1 is 0.8 away from y1
    assert exact_interval_probability(pair, 0.1).p_hat == 0.5
    assert exact_interval_probability(pair, 0.9).p_hat == 1.0


def test_interval_monotone_in_delta():
    pair = make_pair(DeterminantSymmetric(2), 14, 0.4, seed=3)
    ps = [interval_probability(pair, d, 3000, seed=9).p_hat for d in (0.05, 0.1, 0.2, 0.4, 0.8)]
    assert ps == sorted(ps)


@pytest.mark.parametrize("n", [6, 10, 14])
def test_monte_carlo_agrees_with_enumeration(n):
    pair = make_pair(Product(3), n, 0.3, seed=n)
    delta = float(np.median([min_pair_distance(pair), max_pair_distance(pair)]))
    est = interval_probability(pair, delta, 20000, seed=1)
    ex = exact_interval_probability(pair, delta)
    assert est.ci_low <= ex.p_hat <= est.ci_high
    w_mc, w_ex = est.details["window"], ex.details["window"]
    assert w_mc.ci_low <= w_ex.p_hat <= w_mc.ci_high


def test_shifted_targets():
    pair = make_pair(Product(2), 4, 0.5, seed=0)
    sh = pair.shifted(3, 4)
    np.testing.assert_allclose(sh.y1, (2 / (2 * 0.5 * 4)) * np.ones(2))


def test_random_bucket_hash_examples():
    assert np.all(random_bucket_hash(50, 1, seed=3).assignment == 0)
    assert random_bucket_hash(0, 4, seed=3).assignment.size == 0
    counts = random_bucket_hash(10_000, 10, seed=3).counts()
    sd = math.sqrt(10_000 * 0.1 * 0.9)
    assert np.all(np.abs(counts - 1000) <= 4 * sd)
    with pytest.raises(PreconditionError):
        BucketHash(2, [0, 2])


def test_good_buckets_deterministic_case():
    f = Product(3)
    tau, p, m0 = 0.2, 4, 10
    xs = np.tile(tau * f.direction, (p * m0, 1))
    assignment = np.repeat(np.arange(p), m0)
    good, thr = good_bucket_fraction(f, xs, BucketHash(p, assignment), tau)
    assert thr == pytest.approx(1 / (2 * tau * p)) and m0 * tau >= thr and good == p


def test_single_bucket():
    f = Product(3)
    xs = np.tile(0.2 * f.direction, (30, 1))
    good, thr = good_bucket_fraction(f, xs, random_bucket_hash(30, 1, seed=0), 0.2)
    assert good == int(6.0 >= thr)


def test_bucket_hypotheses_enforced():
    f = Product(2)
    with pytest.raises(PreconditionError):
        good_bucket_fraction(f, [[0.1, 0.1]], BucketHash(1, [0]), 0.2)  # mass below 1


def test_bucket_lemma_small_instance():
    f = Product(4)
    tau = 1 / (100 * math.sqrt(math.log(4)))
    xs = half_band(f, math.ceil(4 / tau**2) + 1, tau, np.random.default_rng(5))
    p = math.ceil(lemma_bucket_minimum(tau, 4))
    res = bucket_lemma_experiment(f, xs, tau, p, 40, seed=1)
    assert res.passed and res.bad == 0


def test_boundary_measure_examples():
    pair = make_pair(Product(2), 2, 0.5, seed=4)
    est = boundary_measure(pair, 0.05, 0, seed=0)
    assert est.mode == "exact_enumeration" and est.trials == 4
    assert est.details["implied_constant"] == pytest.approx(est.p_hat * est.details["alpha"] * math.sqrt(2))
    with pytest.raises(PreconditionError):
        boundary_measure(pair, 10.0, 1000, seed=0)


def test_alpha_fraction_lists_violations():
    pair = make_pair(Product(2), 5, 0.5, seed=4)
    alpha, bad = alpha_fraction(pair, 0.0)
    assert alpha == 1.0 and bad.size == 0
