"""Principal component analysis on the correlation matrix.

The eigensolver is a cyclic-by-row Jacobi iteration, which is plenty for
the 8x8 matrices used here and gives fully orthonormal eigenvectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dataset import PREDICTORS
from .errors import BadComponentCount, InputError, NoConvergence, NotSymmetric, ZeroVarianceColumn

SCHEMA = "pca_model_v1"
MAX_SWEEPS = 100
MAX_DIM = 64


@dataclass(frozen=True)
class StandardizationParams:
    columns: tuple
    means: np.ndarray
    sds: np.ndarray

    def apply(self, x):
        return (np.asarray(x, dtype=np.float64) - self.means) / self.sds


def standardize(d, columns=PREDICTORS):
    """Z-score ``columns`` of ``d`` using the n-1 standard deviation."""
    x = d.matrix(columns)
    means = x.mean(axis=0)
    centered = x - means
    sds = np.sqrt((centered * centered).sum(axis=0) / (x.shape[0] - 1))
    for name, sd in zip(columns, sds):
        if not sd > 0:
            raise ZeroVarianceColumn(name)
    params = StandardizationParams(tuple(columns), means, sds)
    return centered / sds, params


def jacobi_eigen(s, tol=1e-12, max_sweeps=MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order (ties keep their diagonal order) and eigenvectors as
    the columns of an orthonormal matrix.
    """
    a = np.array(s, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric("matrix must be square")
    n = a.shape[0]
    if n > MAX_DIM:
        raise InputError(f"dimension {n} exceeds the supported maximum of {MAX_DIM}")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-9:
        raise NotSymmetric("matrix is not symmetric within 1e-9")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    threshold = tol * math.sqrt(float((a * a).sum()))

    def off_norm():
        off = a - np.diag(np.diag(a))
        return math.sqrt(float((off * off).sum()))

    for _ in range(max_sweeps + 1):
        if off_norm() <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    # theta*theta would overflow; t ~ 1/(2 theta)
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                # rotate rows/columns p and q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - sn * aq
                a[q, :] = sn * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    eigenvalues = np.diag(a).copy()
    order = sorted(range(n), key=lambda i: (-eigenvalues[i], i))
    eigenvalues = eigenvalues[order]
    v = v[:, order]
    # largest-magnitude entry of each eigenvector is made positive
    for j in range(n):
        k = int(np.argmax(np.abs(v[:, j])))
        if v[k, j] < 0:
            v[:, j] = -v[:, j]
    return eigenvalues, v


@dataclass(frozen=True)
class PcaModel:
    params: StandardizationParams
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def columns(self):
        return self.params.columns

    @property
    def explained_fraction(self):
        lam = np.clip(self.eigenvalues, 0.0, None)
        return lam / lam.sum()

    @property
    def cumulative_fraction(self):
        cum = np.cumsum(self.explained_fraction)
        cum[-1] = 1.0
        return cum

    def to_json(self):
        doc = {
            "schema": SCHEMA,
            "columns": list(self.columns),
            "means": self.params.means.tolist(),
            "sds": self.params.sds.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise InputError(f"expected schema {SCHEMA!r}, got {doc.get('schema')!r}")
        params = StandardizationParams(
            tuple(doc["columns"]), np.array(doc["means"]), np.array(doc["sds"])
        )
        return cls(params, np.array(doc["eigenvalues"]), np.array(doc["eigenvectors"]))


def fit_pca(d, columns=PREDICTORS):
    z, params = standardize(d, columns)
    corr = (z.T @ z) / (z.shape[0] - 1)
    eigenvalues, vectors = jacobi_eigen(corr)
    return PcaModel(params, eigenvalues, vectors)


def project(model, d, k):
    """Scores of ``d`` on the first ``k`` components, using the model's scaling."""
    dim = len(model.columns)
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= dim):
        raise BadComponentCount(f"component count must be in 1..{dim}, got {k!r}")
    z = model.params.apply(d.matrix(model.columns))
    return z @ model.eigenvectors[:, :k]
