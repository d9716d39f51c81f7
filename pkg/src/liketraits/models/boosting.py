"""Gradient-boosted regression trees (first-order, squared loss).

Round m fits a depth-limited SSE tree to the current residuals and adds
learning_rate * tree to the ensemble. With leaf values equal to the mean
residual and a learning rate in (0, 1], training MSE can never increase
from one round to the next. Fitting stops early if the residuals hit
exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import FeatureSpace
from ..errors import DegenerateInputError
from ..features import FeatureMatrix
from ._tree import Tree, grow_regression_tree


@dataclass(frozen=True)
class BoostingConfig:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_leaf: int = 5

    def __post_init__(self):
        if self.n_rounds < 0:
            raise ValueError("n_rounds must be >= 0")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValueError("learning_rate must be in (0, 1]")


@dataclass
class BoostedTreesModel:
    kind = "boosted_trees"
    feature_space: FeatureSpace
    trait: str
    base_prediction: float
    trees: list[Tree]
    learning_rate: float
    hyperparameters: dict = field(default_factory=dict)
    # Per-round training MSE (index 0 = base prediction only). Kept for
    # diagnostics; not serialized.
    training_mse: list[float] | None = None

    @property
    def dimension(self) -> int:
        return self.feature_space.dimension

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.base_prediction, dtype=np.float64)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out


def fit_boosted_trees(
    train: FeatureMatrix, trait: str, config: BoostingConfig | dict | None = None
) -> BoostedTreesModel:
    if train.n_rows == 0:
        raise DegenerateInputError("cannot fit on zero rows")
    if config is None:
        config = BoostingConfig()
    elif isinstance(config, dict):
        config = BoostingConfig(**config)
    X = train.X
    y = train.trait_values(trait).astype(np.float64)
    n = len(y)

    base = float(np.mean(y))
    pred = np.full(n, base, dtype=np.float64)
    residual = y - pred
    curve = [float(np.mean(residual * residual))]

    trees: list[Tree] = []
    for _ in range(config.n_rounds):
        if float(np.sum(residual * residual)) == 0.0:
            break
        tree = grow_regression_tree(X, residual, config.max_depth, config.min_leaf)
        pred = pred + config.learning_rate * tree.value[tree.apply(X)]
        residual = y - pred
        trees.append(tree)
        curve.append(float(np.mean(residual * residual)))

    return BoostedTreesModel(
        feature_space=train.space,
        trait=trait,
        base_prediction=base,
        trees=trees,
        learning_rate=config.learning_rate,
        hyperparameters={
            "n_rounds": config.n_rounds,
            "learning_rate": config.learning_rate,
            "max_depth": config.max_depth,
            "min_leaf": config.min_leaf,
        },
        training_mse=curve,
    )
