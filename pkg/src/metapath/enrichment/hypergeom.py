"""Hypergeometric probabilities and Benjamini-Hochberg adjustment.

N is the background size, K the number of background genes in the pathway,
n the size of the query list and k the overlap.

The pmf is evaluated as a ratio of three binomial densities in Loader's
saddle-point form (Stirling error + deviance terms), which keeps full
relative precision for large N where differences of ln-gamma values would
cancel.
"""

import math

from ..errors import DomainError
from ..special import ln_gamma

_LN_2PI = 1.8378770664093454836
_LN_SQRT_2PI = 0.91893853320467274178


def _stirlerr(n):
    # ln(n!) - ln(sqrt(2 pi n) (n/e)^n)
    if n <= 15.0:
        if n == 0.0:
            return 0.0
        return ln_gamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _LN_SQRT_2PI
    nn = n * n
    if n > 500:
        return (1 / 12 - (1 / 360) / nn) / n
    if n > 80:
        return (1 / 12 - (1 / 360 - (1 / 1260) / nn) / nn) / n
    if n > 35:
        return (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680) / nn) / nn) / nn) / n
    return (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - (1 / 1188) / nn) / nn) / nn) / nn) / n


def _bd0(x, np_):
    # x log(x / np) + np - x, accurate when x is close to np
    if abs(x - np_) < 0.1 * (x + np_):
        v = (x - np_) / (x + np_)
        s = (x - np_) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / np_) + np_ - x


def _dbinom_raw(x, n, p, q):
    if p == 0.0:
        return 1.0 if x == 0 else 0.0
    if q == 0.0:
        return 1.0 if x == n else 0.0
    if x == 0:
        if n == 0:
            return 1.0
        lc = -_bd0(n, n * q) - n * p if p < 0.1 else n * math.log(q)
        return math.exp(lc)
    if x == n:
        lc = -_bd0(n, n * p) - n * q if q < 0.1 else n * math.log(p)
        return math.exp(lc)
    if x < 0 or x > n:
        return 0.0
    lc = _stirlerr(n) - _stirlerr(x) - _stirlerr(n - x) - _bd0(x, n * p) - _bd0(n - x, n * q)
    lf = _LN_2PI + math.log(x) + math.log1p(-x / n)
    return math.exp(lc - 0.5 * lf)


def _check(N, K, n, k):
    for name, v in (("N", N), ("K", K), ("n", n), ("k", k)):
        if int(v) != v or v < 0:
            raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
    if K > N or n > N:
        raise DomainError(f"need K <= N and n <= N (N={N}, K={K}, n={n})")
    return int(N), int(K), int(n), int(k)


def support(N, K, n):
    return max(0, n - (N - K)), min(K, n)


def hypergeom_pmf(N, K, n, k):
    """P(X = k) = C(K, k) C(N-K, n-k) / C(N, n)."""
    N, K, n, k = _check(N, K, n, k)
    lo, hi = support(N, K, n)
    if k < lo or k > hi:
        return 0.0
    if n == 0 or n == N:
        return 1.0
    p = n / N
    q = (N - n) / N
    p1 = _dbinom_raw(k, K, p, q)
    p2 = _dbinom_raw(n - k, N - K, p, q)
    p3 = _dbinom_raw(n, N, p, q)
    return min(1.0, p1 * p2 / p3)


def _sum_up(N, K, n, start, stop):
    # sum of pmf(j) for j = start..stop by the ratio recurrence (terms decreasing)
    term = hypergeom_pmf(N, K, n, start)
    total = term
    for j in range(start, stop):
        term *= (K - j) * (n - j) / ((j + 1.0) * (N - K - n + j + 1.0))
        total += term
        if term < total * 1e-17:
            break
    return total


def _sum_down(N, K, n, start, stop):
    # sum of pmf(j) for j = start down to stop (terms decreasing)
    term = hypergeom_pmf(N, K, n, start)
    total = term
    for j in range(start, stop, -1):
        term *= j * (N - K - n + j) / ((K - j + 1.0) * (n - j + 1.0))
        total += term
        if term < total * 1e-17:
            break
    return total


def hypergeom_upper_tail(N, K, n, k):
    """Over-representation p-value P(X >= k)."""
    N, K, n, k = _check(N, K, n, k)
    lo, hi = support(N, K, n)
    if k <= lo:
        return 1.0
    if k > hi:
        return 0.0
    mode = (n + 1) * (K + 1) // (N + 2)
    if k > mode:
        return min(1.0, _sum_up(N, K, n, k, hi))
    # the upper tail is large here; subtract the small lower tail instead
    return max(0.0, 1.0 - _sum_down(N, K, n, k - 1, lo))


def bh_adjust(p_values):
    """Benjamini-Hochberg step-up adjusted p-values, in input order."""
    ps = [float(p) for p in p_values]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"p-values must lie in [0, 1], got {p}")
    m = len(ps)
    order = sorted(range(m), key=lambda i: ps[i])
    adjusted = [0.0] * m
    running = 1.0
    for rank in range(m, 0, -1):
        i = order[rank - 1]
        running = min(running, ps[i] * m / rank)
        adjusted[i] = max(running, ps[i])
    return adjusted
