"""Special functions behind every p-value in the package.

ln-gamma (Lanczos), erfc via the regularized incomplete gamma function,
the regularized incomplete beta function (continued fraction, modified
Lentz) and the Student-t distribution built on it.  Pure Python floats;
no scipy.
"""

import math

from .errors import DomainError, NoConvergence

CF_MAX_ITER = 300
CF_EPS = 1e-15
_TINY = 1e-300

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients)
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LN_SQRT_2PI = 0.91893853320467274178
_EULER_GAMMA = 0.57721566490153286061


def _zeta_minus_one(k, terms=2000):
    # zeta(k) - 1 for integer k >= 2: direct sum plus Euler-Maclaurin tail
    total = 0.0
    for n in range(terms, 1, -1):
        total += n ** -k
    n = terms + 0.5
    return total + n ** (1 - k) / (k - 1) - k * n ** (-k - 1) / 24.0


_ROOT_SERIES_TERMS = 40
_ZETA_M1 = [0.0, 0.0] + [_zeta_minus_one(k) for k in range(2, _ROOT_SERIES_TERMS + 1)]


def _ln_gamma_near_one(eps):
    # ln Gamma(1 + eps) = -gamma*eps + sum_k (-1)^k zeta(k)/k eps^k
    total = 0.0
    for k in range(_ROOT_SERIES_TERMS, 1, -1):
        total = total * eps + (-1) ** k * (1.0 + _ZETA_M1[k]) / k
    return eps * (-_EULER_GAMMA + eps * total)


def _ln_gamma_near_two(eps):
    # ln Gamma(2 + eps) = (1 - gamma)*eps + sum_k (-1)^k (zeta(k) - 1)/k eps^k
    total = 0.0
    for k in range(_ROOT_SERIES_TERMS, 1, -1):
        total = total * eps + (-1) ** k * _ZETA_M1[k] / k
    return eps * ((1.0 - _EULER_GAMMA) + eps * total)


def ln_gamma(x):
    """Natural log of the gamma function for x > 0."""
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    # near the roots at 1 and 2 the Lanczos sum loses relative accuracy
    if abs(x - 1.0) < 0.25:
        return _ln_gamma_near_one(x - 1.0)
    if abs(x - 2.0) < 0.25:
        return _ln_gamma_near_two(x - 2.0)
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - ln_gamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _gamma_series(a, x):
    # P(a, x) by its power series; valid for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(CF_MAX_ITER * 4):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * CF_EPS:
            return total * math.exp(-x + a * math.log(x) - ln_gamma(a))
    raise NoConvergence(f"incomplete gamma series failed for a={a}, x={x}")


def _gamma_cf(a, x):
    # Q(a, x) by Lentz's continued fraction; valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, CF_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return math.exp(-x + a * math.log(x) - ln_gamma(a)) * h
    raise NoConvergence(f"incomplete gamma continued fraction failed for a={a}, x={x}")


def erfc(x):
    """Complementary error function, accurate in relative terms in the upper tail."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("erfc of NaN")
    if x == 0.0:
        return 1.0
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < 1e-8:
        # erf(x) = 2x/sqrt(pi) + O(x^3); also keeps x*x from underflowing
        return 1.0 - 2.0 * x / math.sqrt(math.pi)
    x2 = x * x
    if x2 > 800.0:
        return 0.0
    if x2 < 1.5:
        return 1.0 - _gamma_series(0.5, x2)
    return _gamma_cf(0.5, x2)


def normal_cdf(z):
    """Standard normal CDF."""
    z = float(z)
    if math.isnan(z):
        raise DomainError("normal_cdf of NaN")
    return 0.5 * erfc(-z / math.sqrt(2.0))


def normal_two_sided_p(z):
    """2 * (1 - Phi(|z|)) without cancellation."""
    return erfc(abs(float(z)) / math.sqrt(2.0))


def _stirling_correction(x):
    # ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)], asymptotic series, x >= 10
    inv = 1.0 / x
    inv2 = inv * inv
    return inv * (
        1.0 / 12
        - inv2 * (1.0 / 360
        - inv2 * (1.0 / 1260
        - inv2 * (1.0 / 1680
        - inv2 * (1.0 / 1188
        - inv2 * (691.0 / 360360
        - inv2 * (1.0 / 156)))))))


def ln_beta(a, b):
    """ln B(a, b), avoiding cancellation when one argument is large."""
    small, big = (a, b) if a <= b else (b, a)
    if big < 10.0:
        return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
    # ln Gamma(big) - ln Gamma(big + small) without subtracting two huge numbers
    diff = (
        -(big - 0.5) * math.log1p(small / big)
        - small * math.log(big + small)
        + small
        + _stirling_correction(big)
        - _stirling_correction(big + small)
    )
    return ln_gamma(small) + diff


def _beta_cf(a, b, x):
    # continued fraction for I_x(a, b) / front factor, modified Lentz
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h
    raise NoConvergence(
        f"incomplete beta continued fraction did not converge in {CF_MAX_ITER} "
        f"iterations (a={a}, b={b}, x={x})"
    )


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    a, b, x = float(a), float(b), float(x)
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"reg_inc_beta requires a, b > 0 (got a={a}, b={b})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if a == 1.0 and b == 1.0:
        return x
    if x > (a + 1.0) / (a + b + 2.0):
        return 1.0 - _inc_beta_lower(b, a, 1.0 - x)
    return _inc_beta_lower(a, b, x)


def _inc_beta_lower(a, b, x, ln_x=None, ln_1mx=None):
    if ln_x is None:
        ln_x = math.log(x)
    if ln_1mx is None:
        ln_1mx = math.log1p(-x)
    ln_front = a * ln_x + b * ln_1mx - ln_beta(a, b)
    return math.exp(ln_front) * _beta_cf(a, b, x) / a


def _t_tail_pair(t, df):
    # (I_x(df/2, 1/2), 1 - that) with x = df / (df + t^2), both accurate
    t2 = t * t
    if t2 == 0.0:
        return 1.0, 0.0
    x = df / (df + t2)
    y = t2 / (df + t2)
    ln_x = -math.log1p(t2 / df)
    ln_y = -math.log1p(df / t2)
    a, b = 0.5 * df, 0.5
    if x > (a + 1.0) / (a + b + 2.0):
        upper = _inc_beta_lower(b, a, y, ln_y, ln_x)
        return 1.0 - upper, upper
    lower = _inc_beta_lower(a, b, x, ln_x, ln_y)
    return lower, 1.0 - lower


def two_sided_p(t, df):
    """P(|T| >= |t|) for Student's t with ``df`` (possibly fractional) degrees of freedom."""
    t, df = float(t), float(df)
    if not df > 0 or math.isnan(t):
        raise DomainError(f"student t requires df > 0, got {df}")
    if math.isinf(t):
        return 0.0
    return _t_tail_pair(t, df)[0]


def student_t_cdf(t, df):
    """P(T <= t)."""
    t, df = float(t), float(df)
    if not df > 0 or math.isnan(t):
        raise DomainError(f"student t requires df > 0, got {df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5
    half_tail = 0.5 * _t_tail_pair(t, df)[0]
    return 1.0 - half_tail if t > 0 else half_tail
