"""Exact rational references used by the enrichment tests."""

import math
from fractions import Fraction


def exact_pmf(N, K, n, k):
    if k < max(0, n - (N - K)) or k > min(K, n):
        return Fraction(0)
    return Fraction(math.comb(K, k) * math.comb(N - K, n - k), math.comb(N, n))


def exact_upper_tail(N, K, n, k):
    hi = min(K, n)
    num = sum(math.comb(K, j) * math.comb(N - K, n - j) for j in range(max(k, 0), hi + 1))
    return Fraction(num, math.comb(N, n))


def log_fraction(f):
    # natural log of a positive rational without going through float overflow
    return math.log(f.numerator) - math.log(f.denominator)
