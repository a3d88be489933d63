from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlab.enumeration import gray, gray_chunk, iter_gray, map_gray, pattern_count
from hyperlab.errors import BudgetError, PreconditionError
from hyperlab.montecarlo import TailEstimate, map_chunks, resolve_threads, trial_rng, trial_signs, wilson_interval


def test_gray_neighbours_differ_in_one_bit():
    codes = gray(np.arange(64))
    assert len(set(codes.tolist())) == 64
    assert all(bin(a ^ b).count("1") == 1 for a, b in zip(codes[:-1], codes[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.booleans(), st.integers(0, 1000))
def test_gray_chunk_sums_match_direct(n, fixed, seed):
    V = np.random.default_rng(seed).standard_normal((n, 3))
    total = pattern_count(n, fixed)
    lo = total // 3
    signs, sums = gray_chunk(V, lo, total, fixed)
    np.testing.assert_allclose(sums, signs @ V, atol=1e-12)
    if fixed:
        assert np.all(signs[:, 0] == 1)


def test_enumeration_covers_every_pattern():
    V = np.eye(4)
    seen = {tuple(row) for _, s, _ in iter_gray(V, chunk=5) for row in s}
    assert seen == set(itertools.product([1.0, -1.0], repeat=4))


def test_budget():
    with pytest.raises(BudgetError):
        map_gray(np.zeros((25, 1)), lambda lo, s, x: 0)


def test_trial_streams_are_counter_based():
    a = trial_signs(7, 0, 100, 5)
    b = np.vstack([trial_signs(7, i, i + 1, 5) for i in range(100)])
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(trial_rng(7, 0, 0).random(4), trial_rng(7, 0, 1).random(4))
    assert not np.array_equal(trial_signs(7, 0, 50, 8), trial_signs(8, 0, 50, 8))


def test_consecutive_trials_share_no_draws():
    a = trial_rng(1, 0).random(64)
    b = trial_rng(1, 1).random(64)
    assert np.intersect1d(a, b).size == 0
    signs = trial_signs(5, 0, 20000, 12)
    corr = np.corrcoef(signs.T) - np.eye(12)
    assert np.abs(corr).max() < 0.04


def test_map_chunks_order_independent_of_threads():
    fn = lambda lo, hi: trial_signs(3, lo, hi, 4).sum()  # noqa: E731
    assert map_chunks(fn, 1000, 64, threads=1) == map_chunks(fn, 1000, 64, threads=8)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("HYPERLAB_THREADS", "3")
    assert resolve_threads() == 3
    with pytest.raises(PreconditionError):
        resolve_threads(0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5000), st.data())
def test_wilson_contains_estimate(trials, data):
    k = data.draw(st.integers(0, trials))
    lo, hi = wilson_interval(k, trials)
    assert 0 <= lo <= k / trials <= hi <= 1


def test_exact_estimate_has_degenerate_interval():
    est = TailEstimate.exact(1.0, 0.25, 16)
    assert est.ci_low == est.p_hat == est.ci_high and est.mode == "exact_enumeration"
    mc = TailEstimate.from_counts(1.0, 0, 50000, seed=1)
    assert mc.p_hat == 0 and 0 < mc.ci_high < 2e-4 and mc.mode == "monte_carlo"
