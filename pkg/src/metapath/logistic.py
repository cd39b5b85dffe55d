"""Binary logistic regression fitted by iteratively reweighted least squares."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NoConvergence, Separation, ShapeMismatch, SingleClass
from .special import normal_two_sided_p

SCHEMA = "logreg_model_v1"
DIVERGENCE_LIMIT = 30.0
MAX_HALVINGS = 20
LL_SLACK = 1e-13
SEPARATION_RESIDUAL = 1e-6


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 50
    gradient_tolerance: float = 1e-8
    ridge_jitter: float = 1e-10

    def __post_init__(self):
        if not (self.max_iterations > 0 and self.gradient_tolerance > 0 and self.ridge_jitter > 0):
            raise InputError("FitConfig values must all be positive")


@dataclass(frozen=True)
class LogisticModel:
    feature_names: tuple  # intercept first
    coefficients: np.ndarray
    std_errors: np.ndarray
    n_iterations: int
    converged: bool
    final_gradient_norm: float
    log_likelihood: float = math.nan
    history: tuple = field(default=(), compare=False)

    @property
    def z_stats(self):
        return self.coefficients / self.std_errors

    @property
    def p_values(self):
        return np.array([normal_two_sided_p(z) for z in self.z_stats])

    def table(self):
        return [
            {
                "feature": name,
                "coefficient": float(b),
                "std_error": float(se),
                "z": float(z),
                "p_value": float(p),
            }
            for name, b, se, z, p in zip(
                self.feature_names, self.coefficients, self.std_errors, self.z_stats, self.p_values
            )
        ]

    def to_json(self):
        doc = {
            "schema": SCHEMA,
            "feature_names": list(self.feature_names),
            "coefficients": self.coefficients.tolist(),
            "std_errors": self.std_errors.tolist(),
            "convergence": {
                "n_iterations": self.n_iterations,
                "converged": self.converged,
                "final_gradient_norm": self.final_gradient_norm,
                "log_likelihood": self.log_likelihood,
            },
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise InputError(f"expected schema {SCHEMA!r}, got {doc.get('schema')!r}")
        conv = doc["convergence"]
        return cls(
            tuple(doc["feature_names"]),
            np.array(doc["coefficients"], dtype=np.float64),
            np.array(doc["std_errors"], dtype=np.float64),
            conv["n_iterations"],
            conv["converged"],
            conv["final_gradient_norm"],
            conv.get("log_likelihood", math.nan),
        )


def sigmoid(eta):
    """Overflow-safe logistic function."""
    eta = np.asarray(eta, dtype=np.float64)
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def log_likelihood(beta, xd, y):
    """Bernoulli log-likelihood for a design matrix that already has its intercept column."""
    eta = xd @ beta
    # log(1 + e^eta) computed stably
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def gradient(beta, xd, y):
    return xd.T @ (y - sigmoid(xd @ beta))


def _design(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1) if x.size else x.reshape(0, 0)
    return np.column_stack([np.ones(x.shape[0]), x]) if x.shape[1] else np.ones((x.shape[0], 1))


def fit_irls(x, y, cfg=None, feature_names=None):
    """Maximum-likelihood logistic regression with an automatic intercept.

    ``x`` is n x p without the intercept column (p may be 0). Newton steps
    solve (X'WX + jitter*I) delta = X'(y - p); a step that lowers the
    log-likelihood is halved up to 20 times.
    """
    cfg = cfg or FitConfig()
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(len(y), -1)
    n, p = x.shape
    if y.shape != (n,):
        raise ShapeMismatch(f"x has {n} rows but y has {y.shape[0]} labels")
    if not np.all((y == 0) | (y == 1)):
        raise InputError("labels must be 0 or 1")
    if y.min() == y.max():
        raise SingleClass("labels contain only one class")
    if n < p + 1:
        raise ShapeMismatch(f"need at least {p + 1} rows for {p} features, got {n}")
    if feature_names is None:
        feature_names = [f"x{i + 1}" for i in range(p)]
    names = ("(Intercept)",) + tuple(feature_names)
    if len(names) != p + 1:
        raise ShapeMismatch("feature_names length does not match the column count")

    xd = _design(x)
    beta = np.zeros(p + 1)
    ll = log_likelihood(beta, xd, y)
    history = [ll]
    jitter = cfg.ridge_jitter * np.eye(p + 1)
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        mu = sigmoid(xd @ beta)
        grad = xd.T @ (y - mu)
        if np.max(np.abs(grad)) <= cfg.gradient_tolerance:
            converged = True
            iterations -= 1
            break
        w = mu * (1.0 - mu)
        info = xd.T @ (xd * w[:, None]) + jitter
        step = np.linalg.solve(info, grad)
        scale = 1.0
        # near the optimum a Newton step changes ll by less than its rounding error
        slack = LL_SLACK * max(1.0, abs(ll))
        for _ in range(MAX_HALVINGS + 1):
            candidate = beta + scale * step
            cand_ll = log_likelihood(candidate, xd, y)
            if cand_ll >= ll - slack:
                break
            scale *= 0.5
        else:
            # no ascent possible along the Newton direction: at the numerical optimum
            candidate, cand_ll = beta, ll
        beta, ll = candidate, cand_ll
        history.append(ll)
        big = np.flatnonzero(np.abs(beta) > DIVERGENCE_LIMIT)
        if big.size:
            i = int(big[0])
            raise Separation(names[i], float(beta[i]))
    else:
        mu = sigmoid(xd @ beta)
        grad = xd.T @ (y - mu)
        converged = bool(np.max(np.abs(grad)) <= cfg.gradient_tolerance)
        if not converged:
            raise NoConvergence(
                f"IRLS did not reach max|gradient| <= {cfg.gradient_tolerance} "
                f"in {cfg.max_iterations} iterations"
            )

    mu = sigmoid(xd @ beta)
    if p and np.max(np.abs(y - mu)) < SEPARATION_RESIDUAL:
        # every weight has collapsed: the classes are separable and the optimum is at infinity
        i = 1 + int(np.argmax(np.abs(beta[1:])))
        raise Separation(names[i], float(beta[i]))
    grad = xd.T @ (y - mu)
    w = mu * (1.0 - mu)
    info = xd.T @ (xd * w[:, None]) + jitter
    cov = np.linalg.inv(info)
    se = np.sqrt(np.diag(cov))
    return LogisticModel(
        feature_names=names,
        coefficients=beta,
        std_errors=se,
        n_iterations=iterations,
        converged=converged,
        final_gradient_norm=float(np.max(np.abs(grad))),
        log_likelihood=ll,
        history=tuple(history),
    )


def predict_proba(model, x):
    x = np.asarray(x, dtype=np.float64)
    p = len(model.feature_names) - 1
    if x.ndim == 1:
        x = x.reshape(1, -1) if p else x.reshape(-1, 0)
    if x.shape[1] != p:
        raise ShapeMismatch(f"model expects {p} features, got {x.shape[1]}")
    return sigmoid(model.coefficients[0] + x @ model.coefficients[1:])


def classify(probabilities, threshold=0.5):
    """1 where probability >= threshold, else 0."""
    if not 0.0 < threshold < 1.0:
        raise InputError(f"threshold must lie in (0, 1), got {threshold}")
    return (np.asarray(probabilities) >= threshold).astype(np.int64)
