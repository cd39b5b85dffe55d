"""Seeded splitting, confusion matrices, classification metrics and seed sweeps."""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .dataset import group_medians, impute_zeros
from .errors import DegenerateSplit, EmptyMatrix, InputError, LengthMismatch, NonBinary
from .logistic import FitConfig, classify, fit_irls, predict_proba
from .pca import fit_pca, project

MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 generator; bit-exact across platforms."""

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    __next__ = next

    def __iter__(self):
        return self


def prng_stream(seed):
    return SplitMix64(seed)


@dataclass(frozen=True)
class SplitIndices:
    train: tuple
    test: tuple
    seed: int


def train_test_split(n, test_fraction, seed):
    """Fisher-Yates shuffle of 0..n-1; the first floor(fraction*n) indices are the test set."""
    if not 0.0 < test_fraction < 1.0:
        raise InputError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n_test = math.floor(test_fraction * n)
    if n < 2 or n_test < 1 or n_test >= n:
        raise DegenerateSplit(f"cannot split {n} rows with test fraction {test_fraction}")
    rng = SplitMix64(seed)
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        # modulo reduction; its bias is about (i + 1) / 2**64
        j = rng.next() % (i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return SplitIndices(train=tuple(idx[n_test:]), test=tuple(idx[:n_test]), seed=int(seed) & MASK64)


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self):
        return self.tn + self.fp + self.fn + self.tp


def confusion(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.size} labels vs {y_pred.size} predictions")
    if y_true.size == 0:
        raise LengthMismatch("no samples to evaluate")
    for arr in (y_true, y_pred):
        if not np.all((arr == 0) | (arr == 1)):
            raise NonBinary("labels must be 0 or 1")
    t = y_true == 1
    p = y_pred == 1
    return ConfusionMatrix(
        tn=int(np.sum(~t & ~p)), fp=int(np.sum(~t & p)), fn=int(np.sum(t & ~p)), tp=int(np.sum(t & p))
    )


@dataclass(frozen=True)
class MetricsReport:
    """Classification metrics; ``None`` marks a ratio with a zero denominator."""

    accuracy: float
    precision: float | None
    recall: float | None
    specificity: float | None
    f1: float | None


def _ratio(num, den):
    return num / den if den else None


def metrics(c):
    if c.total <= 0:
        raise EmptyMatrix("confusion matrix is empty")
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    # harmonic mean of precision and recall, written in counts
    f1 = None if precision is None or recall is None else _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn)
    return MetricsReport(
        accuracy=(c.tp + c.tn) / c.total,
        precision=precision,
        recall=recall,
        specificity=_ratio(c.tn, c.tn + c.fp),
        f1=f1,
    )


@dataclass(frozen=True)
class PipelineConfig:
    test_fraction: float = 0.2
    n_components: int = 5
    threshold: float = 0.5
    leakage_free: bool = False
    fit: FitConfig = FitConfig()


@dataclass(frozen=True)
class SplitEvaluation:
    seed: int
    split: SplitIndices
    model: object
    confusion: ConfusionMatrix
    metrics: MetricsReport


def evaluate_split(raw, cfg, seed, imputed=None, pca_model=None):
    """Impute -> PCA -> split -> logistic fit on train scores -> test metrics.

    Without ``leakage_free`` the imputation medians and the PCA are computed
    on the full dataset before splitting. ``imputed`` and ``pca_model`` can
    be passed in to reuse those full-data stages across seeds.
    """
    split = train_test_split(raw.n_rows, cfg.test_fraction, seed)
    if cfg.leakage_free:
        train_raw = raw.take(split.train)
        medians = group_medians(train_raw)
        train_d, _ = impute_zeros(train_raw, medians)
        test_d, _ = impute_zeros(raw.take(split.test), medians)
        pca_model = fit_pca(train_d)
    else:
        if imputed is None:
            imputed, _ = impute_zeros(raw)
        if pca_model is None:
            pca_model = fit_pca(imputed)
        train_d = imputed.take(split.train)
        test_d = imputed.take(split.test)
    k = cfg.n_components
    names = [f"PC{i + 1}" for i in range(k)]
    model = fit_irls(project(pca_model, train_d, k), train_d.outcome(), cfg.fit, feature_names=names)
    y_pred = classify(predict_proba(model, project(pca_model, test_d, k)), cfg.threshold)
    cm = confusion(test_d.outcome(), y_pred)
    return SplitEvaluation(seed, split, model, cm, metrics(cm))


@dataclass(frozen=True)
class SweepSummary:
    n_seeds: int
    mean_accuracy: float
    min_accuracy: float
    max_accuracy: float
    sd_accuracy: float


def seed_sweep(raw, cfg, seeds, workers=1):
    """Evaluate every seed; returns (evaluations sorted by seed, summary)."""
    seeds = list(seeds)
    if not seeds:
        raise InputError("seed_sweep needs at least one seed")
    imputed = pca_model = None
    if not cfg.leakage_free:
        imputed, _ = impute_zeros(raw)
        pca_model = fit_pca(imputed)

    def one(seed):
        return evaluate_split(raw, cfg, seed, imputed, pca_model)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    results.sort(key=lambda r: r.seed)
    acc = [r.metrics.accuracy for r in results]
    summary = SweepSummary(
        n_seeds=len(acc),
        mean_accuracy=statistics.fmean(acc),
        min_accuracy=min(acc),
        max_accuracy=max(acc),
        sd_accuracy=statistics.stdev(acc) if len(acc) > 1 else 0.0,
    )
    return results, summary


SWEEP_FIELDS = ("seed", "tn", "fp", "fn", "tp", "accuracy", "precision", "recall", "specificity", "f1")


def sweep_rows(results):
    rows = []
    for r in results:
        row = {"seed": r.seed}
        row.update(asdict(r.confusion))
        row.update(asdict(r.metrics))
        rows.append(row)
    return rows
