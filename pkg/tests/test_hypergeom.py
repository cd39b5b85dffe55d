import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import exact_pmf, exact_upper_tail, log_fraction

from metapath.enrichment import bh_adjust, hypergeom_pmf, hypergeom_upper_tail
from metapath.errors import DomainError

TINY = 1e-300


@st.composite
def params(draw, max_n=5000):
    N = draw(st.integers(1, max_n))
    K = draw(st.integers(0, N))
    n = draw(st.integers(0, N))
    return N, K, n


def test_pmf_reference_points():
    assert hypergeom_pmf(10, 5, 5, 5) == pytest.approx(1 / 252, rel=1e-13)
    assert hypergeom_pmf(10, 5, 5, 6) == 0.0
    assert sum(hypergeom_pmf(50, 20, 10, k) for k in range(11)) == pytest.approx(1.0, abs=1e-12)


def test_upper_tail_reference_points():
    assert hypergeom_upper_tail(60, 12, 8, 0) == 1.0
    assert hypergeom_upper_tail(60, 12, 8, 4) == pytest.approx(0.043420390018748554, rel=1e-12)
    assert hypergeom_upper_tail(60, 12, 8, 9) == 0.0


def test_small_n_exhaustive_against_exact():
    worst = 0.0
    for N in range(1, 26):
        for K in range(N + 1):
            for n in range(N + 1):
                for k in range(min(K, n) + 1):
                    exact = exact_upper_tail(N, K, n, k)
                    if exact == 0:
                        continue
                    worst = max(worst, abs(math.log(hypergeom_upper_tail(N, K, n, k)) - log_fraction(exact)))
    assert worst <= 1e-9


@settings(max_examples=150, deadline=None)
@given(params(), st.data())
def test_tail_matches_exact_for_large_counts(p, data):
    N, K, n = p
    lo, hi = max(0, n - (N - K)), min(K, n)
    k = data.draw(st.integers(lo, hi))
    exact = exact_upper_tail(N, K, n, k)
    got = hypergeom_upper_tail(N, K, n, k)
    if exact < TINY:
        return  # below double range
    assert abs(math.log(got) - log_fraction(exact)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(params())
def test_pmf_normalizes(p):
    N, K, n = p
    total = math.fsum(hypergeom_pmf(N, K, n, k) for k in range(min(K, n) + 1))
    assert abs(total - 1.0) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(params(max_n=400))
def test_tail_monotone(p):
    N, K, n = p
    tails = [hypergeom_upper_tail(N, K, n, k) for k in range(min(K, n) + 2)]
    assert all(b <= a for a, b in zip(tails, tails[1:]))
    assert all(0.0 <= t <= 1.0 for t in tails)


def test_pmf_matches_exact_value():
    assert hypergeom_pmf(20000, 40, 12, 8) == pytest.approx(float(exact_pmf(20000, 40, 12, 8)), rel=1e-12)


def test_domain_errors():
    for bad in ((10, 11, 2, 1), (10, 2, 11, 1), (10, 2, 2, -1), (10.5, 2, 2, 1)):
        with pytest.raises(DomainError):
            hypergeom_upper_tail(*bad)


def test_bh_adjust_cases():
    assert bh_adjust([0.2]) == [0.2]
    assert bh_adjust([0.01, 0.02, 0.03]) == pytest.approx([0.03, 0.03, 0.03])
    assert bh_adjust([0.04] * 5) == pytest.approx([0.04] * 5)
    assert bh_adjust([]) == []
    with pytest.raises(DomainError):
        bh_adjust([1.5])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=40))
def test_bh_properties(ps):
    adj = bh_adjust(ps)
    assert all(p <= a <= 1.0 for p, a in zip(ps, adj))
    order = sorted(range(len(ps)), key=lambda i: ps[i])
    assert all(adj[order[i]] <= adj[order[i + 1]] for i in range(len(ps) - 1))
