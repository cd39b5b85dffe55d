import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metapath.dataset import CANONICAL, PREDICTORS, Dataset
from metapath.errors import TooFewSamples, ZeroVariance, ZeroVarianceColumn
from metapath.stattests import correlation_matrix, outcome_t_tests, welch_t_test

# exact values for xs=[1..5], ys=2*xs: t = -3/sqrt(2.5), df = 100/17
WELCH_T = -1.8973665961010276
WELCH_DF = 100 / 17
WELCH_P = 0.10753119493062724

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_welch_reference_toy():
    r = welch_t_test([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert abs(r.t_stat - WELCH_T) <= 1e-9
    assert abs(r.df - WELCH_DF) <= 1e-9
    assert r.p_two_sided == pytest.approx(WELCH_P, rel=1e-10)
    assert (r.n0, r.n1, r.mean0, r.mean1) == (5, 5, 3.0, 6.0)


def test_welch_identical_samples():
    r = welch_t_test([1, 2, 3, 4], [1, 2, 3, 4])
    assert r.t_stat == 0.0
    assert r.p_two_sided == 1.0


def test_welch_errors():
    with pytest.raises(TooFewSamples):
        welch_t_test([1.0], [1.0, 2.0])
    with pytest.raises(ZeroVariance):
        welch_t_test([3, 3, 3], [3, 3])


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=2, max_size=30), st.lists(finite, min_size=2, max_size=30))
def test_welch_antisymmetry(xs, ys):
    if np.var(xs) + np.var(ys) < 1e-6:
        return
    a, b = welch_t_test(xs, ys), welch_t_test(ys, xs)
    assert a.t_stat == pytest.approx(-b.t_stat, rel=1e-12, abs=1e-12)
    assert a.df == pytest.approx(b.df, rel=1e-12)
    assert a.p_two_sided == pytest.approx(b.p_two_sided, rel=1e-9, abs=1e-300)
    # df lies between min(n)-1 and n0+n1-2
    assert min(len(xs), len(ys)) - 1 - 1e-9 <= a.df <= len(xs) + len(ys) - 2 + 1e-9


def test_outcome_t_tests_covers_every_predictor(synth_raw):
    tests = outcome_t_tests(synth_raw)
    assert list(tests) == list(PREDICTORS)
    y = synth_raw.outcome()
    g = tests["Glucose"]
    assert g.n0 == int((y == 0).sum()) and g.n1 == int((y == 1).sum())


def test_correlation_matches_numpy(synth_raw):
    cm = correlation_matrix(synth_raw)
    ref = np.corrcoef(synth_raw.matrix(PREDICTORS), rowvar=False)
    np.testing.assert_allclose(cm.r, ref, atol=1e-12)
    assert np.array_equal(cm.r, cm.r.T)
    assert all(abs(cm[c, c] - 1.0) <= 1e-12 for c in PREDICTORS)
    assert cm["Age", "Pregnancies"] == cm["Pregnancies", "Age"]


def test_correlation_zero_variance():
    cols = {c: np.arange(5.0) for c in CANONICAL}
    cols["Insulin"] = np.full(5, 80.0)
    cols["Outcome"] = np.array([0, 1, 0, 1, 0.0])
    with pytest.raises(ZeroVarianceColumn) as info:
        correlation_matrix(Dataset(cols))
    assert info.value.column == "Insulin"


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 40), st.integers(0, 2**32 - 1))
def test_correlation_bounds_property(n, seed):
    rng = np.random.default_rng(seed)
    cols = {c: rng.normal(size=n) for c in PREDICTORS}
    cols["Outcome"] = rng.integers(0, 2, n)
    cm = correlation_matrix(Dataset(cols))
    assert np.all(np.abs(cm.r) <= 1.0)
    eig = np.linalg.eigvalsh(cm.r)
    assert eig.min() >= -1e-10
    assert math.isclose(np.trace(cm.r), len(PREDICTORS))
