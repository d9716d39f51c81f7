"""The four regressors and the classification baseline.

Every regressor exposes ``predict_raw``; the public :func:`predict` clamps
raw output into the legal [1, 5] trait range (values above five round down
to five, values below one round up to one), identically for all kinds.
"""

from __future__ import annotations

import numpy as np

from ..core import SCALE_MAX, SCALE_MIN
from ..errors import DimensionMismatchError
from ..features import FeatureMatrix
from ._tree import Tree
from .boosting import BoostedTreesModel, BoostingConfig, fit_boosted_trees
from .forest import (
    ForestClassifier,
    ForestConfig,
    class_midpoint,
    fit_forest_classifier,
    score_to_class,
)
from .knn import KnnConfig, KnnModel, fit_knn, knn_distance, support_set
from .linear import LinearModel, fit_linear
from .mlp import MlpConfig, MlpModel, fit_mlp
from .serialize import (
    load_any,
    load_model,
    model_from_doc,
    model_to_doc,
    save_bundle,
    save_model,
)

#: Regression algorithms usable in comparisons and sweeps.
REGRESSORS = ("linear", "boosted_trees", "knn", "mlp")
#: Everything cmd_train accepts.
ALGORITHMS = REGRESSORS + ("forest_classifier",)

_FITTERS = {
    "linear": fit_linear,
    "boosted_trees": fit_boosted_trees,
    "knn": fit_knn,
    "mlp": fit_mlp,
    "forest_classifier": fit_forest_classifier,
}

_SEEDED = ("mlp", "forest_classifier")


def clamp(value):
    """Clip raw predictions into [1, 5]."""
    return np.clip(value, SCALE_MIN, SCALE_MAX)


def predict(model, features):
    """Clamped prediction for a single feature vector or a matrix of rows.

    Returns a float for 1-d input, an array for 2-d input.
    """
    X = np.asarray(features, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != model.dimension:
        raise DimensionMismatchError(
            f"feature dimension {X.shape[1]} does not match model ({model.dimension})"
        )
    out = clamp(model.predict_raw(X))
    return float(out[0]) if single else out


def train_model(
    algorithm: str,
    train: FeatureMatrix,
    trait: str,
    config: dict | None = None,
    seed: int | None = None,
):
    """Dispatch to the right fitter; threads the seed into algorithms that
    use randomness."""
    if algorithm not in _FITTERS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    cfg = dict(config or {})
    if seed is not None and algorithm in _SEEDED:
        cfg.setdefault("seed", seed)
    return _FITTERS[algorithm](train, trait, cfg or None)


__all__ = [
    "ALGORITHMS",
    "REGRESSORS",
    "BoostedTreesModel",
    "BoostingConfig",
    "ForestClassifier",
    "ForestConfig",
    "KnnConfig",
    "KnnModel",
    "LinearModel",
    "MlpConfig",
    "MlpModel",
    "Tree",
    "clamp",
    "class_midpoint",
    "fit_boosted_trees",
    "fit_forest_classifier",
    "fit_knn",
    "fit_linear",
    "fit_mlp",
    "knn_distance",
    "load_any",
    "load_model",
    "model_from_doc",
    "model_to_doc",
    "predict",
    "save_bundle",
    "save_model",
    "score_to_class",
    "support_set",
    "train_model",
]
