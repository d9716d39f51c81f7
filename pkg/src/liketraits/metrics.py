"""Evaluation metrics and per-trait reports.

Regression quality is MSE = (1/n) * sum((predicted - actual)^2) and its
square root, plus mean |error| over the 4-point trait range as a percentage
style statistic. Classification gets per-class precision/recall with a
confusion matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SCALE_MAX, SCALE_MIN
from .errors import (
    EmptyInputError,
    FeatureSpaceMismatchError,
    LabelOutOfRangeError,
    LengthMismatchError,
)
from .features import FeatureMatrix

REPORT_CSV_HEADER = "trait,algorithm,n_test,mse,rmse,mae_pct"


@dataclass(frozen=True)
class RegressionReport:
    trait: str
    algorithm: str
    n_test: int
    mse: float
    rmse: float
    mae_pct: float  # mean |error| / 4, the width of the [1,5] scale

    def to_json_dict(self) -> dict:
        return {
            "trait": self.trait,
            "algorithm": self.algorithm,
            "n_test": self.n_test,
            "mse": self.mse,
            "rmse": self.rmse,
            "mae_pct": self.mae_pct,
        }

    def to_csv_row(self) -> str:
        return (
            f"{self.trait},{self.algorithm},{self.n_test},"
            f"{self.mse!r},{self.rmse!r},{self.mae_pct!r}"
        )


@dataclass(frozen=True)
class ClassificationReport:
    n_classes: int
    confusion: np.ndarray          # (n_classes, n_classes); rows = actual
    precision: np.ndarray          # per class, 0 where undefined
    recall: np.ndarray
    macro_precision: float         # unweighted mean over classes with support
    macro_recall: float
    zero_denominator_classes: tuple[int, ...] = field(default=())


def compute_regression_metrics(predicted, actual) -> tuple[float, float, float]:
    """(mse, rmse, mae_pct) for two equal-length value sequences."""
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape:
        raise LengthMismatchError(f"predicted {p.shape} vs actual {a.shape}")
    if p.size == 0:
        raise EmptyInputError("metrics need at least one pair")
    err = p - a
    mse = float(np.mean(err * err))
    rmse = float(np.sqrt(mse))
    mae_pct = float(np.mean(np.abs(err)) / (SCALE_MAX - SCALE_MIN))
    return mse, rmse, mae_pct


def compute_classification_metrics(predicted, actual, n_classes: int) -> ClassificationReport:
    """Precision/recall per class; zero-denominator metrics are 0 and the
    affected classes are flagged in the report."""
    p = np.asarray(predicted, dtype=np.int64)
    a = np.asarray(actual, dtype=np.int64)
    if p.shape != a.shape:
        raise LengthMismatchError(f"predicted {p.shape} vs actual {a.shape}")
    if p.size == 0:
        raise EmptyInputError("metrics need at least one pair")
    for arr in (p, a):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise LabelOutOfRangeError(f"labels must lie in [0, {n_classes})")
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (a, p), 1)
    tp = np.diag(confusion).astype(np.float64)
    predicted_per_class = confusion.sum(axis=0).astype(np.float64)
    support = confusion.sum(axis=1).astype(np.float64)
    flagged = []
    precision = np.zeros(n_classes)
    recall = np.zeros(n_classes)
    for c in range(n_classes):
        if predicted_per_class[c] > 0:
            precision[c] = tp[c] / predicted_per_class[c]
        else:
            flagged.append(c)
        if support[c] > 0:
            recall[c] = tp[c] / support[c]
        else:
            flagged.append(c)
    with_support = support > 0
    macro_p = float(np.mean(precision[with_support])) if with_support.any() else 0.0
    macro_r = float(np.mean(recall[with_support])) if with_support.any() else 0.0
    return ClassificationReport(
        n_classes=n_classes,
        confusion=confusion,
        precision=precision,
        recall=recall,
        macro_precision=macro_p,
        macro_recall=macro_r,
        zero_denominator_classes=tuple(sorted(set(flagged))),
    )


def evaluate(model, test: FeatureMatrix, trait: str | None = None) -> RegressionReport:
    """Clamped predictions over all test rows, folded into a report.

    The model must have been fit over the same feature space as the matrix.
    """
    from .models import predict  # local import to avoid a cycle

    if model.feature_space != test.space:
        raise FeatureSpaceMismatchError(
            "model and matrix were built over different feature spaces"
        )
    trait = trait or model.trait
    if test.n_rows == 0:
        raise EmptyInputError("empty test set")
    predictions = predict(model, test.X)
    actual = test.trait_values(trait)
    mse, rmse, mae_pct = compute_regression_metrics(predictions, actual)
    return RegressionReport(
        trait=trait,
        algorithm=model.kind,
        n_test=test.n_rows,
        mse=mse,
        rmse=rmse,
        mae_pct=mae_pct,
    )
