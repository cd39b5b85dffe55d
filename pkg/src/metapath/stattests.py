"""Welch two-sample t-tests by outcome group and Pearson correlation matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import PREDICTORS
from .errors import TooFewSamples, ZeroVariance, ZeroVarianceColumn
from .special import two_sided_p


@dataclass(frozen=True)
class TTestResult:
    mean0: float
    mean1: float
    t_stat: float
    df: float
    p_two_sided: float
    n0: int
    n1: int


def welch_t_test(xs, ys):
    """Unequal-variance t-test of mean(xs) - mean(ys).

    Degrees of freedom follow Welch-Satterthwaite and are usually fractional.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n0, n1 = xs.size, ys.size
    if n0 < 2 or n1 < 2:
        raise TooFewSamples(f"each sample needs at least 2 values (got {n0} and {n1})")
    m0, m1 = float(xs.mean()), float(ys.mean())
    v0 = float(xs.var(ddof=1)) / n0
    v1 = float(ys.var(ddof=1)) / n1
    se2 = v0 + v1
    if se2 == 0.0:
        raise ZeroVariance("both samples are constant")
    t = (m0 - m1) / math.sqrt(se2)
    df = se2 * se2 / (v0 * v0 / (n0 - 1) + v1 * v1 / (n1 - 1))
    return TTestResult(m0, m1, t, df, two_sided_p(t, df), n0, n1)


def outcome_t_tests(d, columns=PREDICTORS):
    """One Welch test per column comparing outcome 0 against outcome 1."""
    y = d.outcome()
    return {c: welch_t_test(d[c][y == 0], d[c][y == 1]) for c in columns}


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple
    r: np.ndarray

    def __getitem__(self, pair):
        a, b = pair
        return float(self.r[self.labels.index(a), self.labels.index(b)])


def correlation_matrix(d, columns=PREDICTORS):
    """Pairwise Pearson coefficients for ``columns`` of ``d``."""
    if d.n_rows < 2:
        raise TooFewSamples("correlation needs at least 2 rows")
    x = d.matrix(columns)
    centered = x - x.mean(axis=0)
    norms = np.sqrt((centered * centered).sum(axis=0))
    for name, nrm in zip(columns, norms):
        if nrm == 0.0:
            raise ZeroVarianceColumn(name)
    unit = centered / norms
    r = unit.T @ unit
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    r = np.clip(r, -1.0, 1.0)
    r.setflags(write=False)
    return CorrelationMatrix(tuple(columns), r)
