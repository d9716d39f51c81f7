"""Random-forest classification baseline over discretized trait scores.

Targets are binned into n_classes equal-width intervals of [1, 5] (the top
edge inclusive). Each tree trains on a bootstrap resample with sqrt(dim)
feature subsampling per split; prediction is the majority vote with ties
broken toward the lowest class index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import SCALE_MAX, SCALE_MIN, FeatureSpace
from ..errors import DegenerateInputError
from ..features import FeatureMatrix
from ._tree import Tree, grow_classification_tree


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 50
    n_classes: int = 5
    max_depth: int = 8
    seed: int = 0
    min_leaf: int = 1
    bootstrap: bool = True
    feature_subsample: bool = True  # sqrt(dim) candidates per split when on

    def __post_init__(self):
        if self.n_trees < 1 or self.n_classes < 2 or self.max_depth < 1:
            raise ValueError("n_trees >= 1, n_classes >= 2, max_depth >= 1 required")


def score_to_class(scores, n_classes: int) -> np.ndarray:
    """Equal-width bin index over [1, 5]; e.g. with 5 classes the edges are
    1, 1.8, 2.6, 3.4, 4.2, 5 and a score of exactly 5 lands in the top bin."""
    s = np.asarray(scores, dtype=np.float64)
    width = (SCALE_MAX - SCALE_MIN) / n_classes
    return np.clip(np.floor((s - SCALE_MIN) / width).astype(np.int64), 0, n_classes - 1)


def class_midpoint(cls: int, n_classes: int) -> float:
    width = (SCALE_MAX - SCALE_MIN) / n_classes
    return SCALE_MIN + (cls + 0.5) * width


@dataclass
class ForestClassifier:
    kind = "forest_classifier"
    feature_space: FeatureSpace
    trait: str
    trees: list[Tree]
    n_classes: int
    hyperparameters: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.feature_space.dimension

    def predict_class(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        for tree in self.trees:
            predicted = tree.predict(X).astype(np.int64)
            votes[np.arange(X.shape[0]), predicted] += 1
        # argmax returns the first maximum: ties go to the lowest class
        return np.argmax(votes, axis=1)

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        """Score-style output: midpoint of the voted class bin."""
        width = (SCALE_MAX - SCALE_MIN) / self.n_classes
        return SCALE_MIN + (self.predict_class(X) + 0.5) * width


def fit_forest_classifier(
    train: FeatureMatrix, trait: str, config: ForestConfig | dict | None = None
) -> ForestClassifier:
    if train.n_rows == 0:
        raise DegenerateInputError("cannot fit on zero rows")
    if config is None:
        config = ForestConfig()
    elif isinstance(config, dict):
        config = ForestConfig(**config)
    X = train.X
    labels = score_to_class(train.trait_values(trait), config.n_classes)
    n, dim = X.shape
    max_features = None
    if config.feature_subsample:
        max_features = max(1, int(np.sqrt(dim)))

    # per-tree generators derived from the master seed, so trees can be
    # built in any order without changing the forest
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    trees: list[Tree] = []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        if config.bootstrap:
            rows = rng.integers(0, n, size=n)
        else:
            rows = np.arange(n)
        trees.append(
            grow_classification_tree(
                X[rows],
                labels[rows],
                config.n_classes,
                config.max_depth,
                config.min_leaf,
                max_features=max_features,
                rng=rng,
            )
        )
    return ForestClassifier(
        feature_space=train.space,
        trait=trait,
        trees=trees,
        n_classes=config.n_classes,
        hyperparameters={
            "n_trees": config.n_trees,
            "n_classes": config.n_classes,
            "max_depth": config.max_depth,
            "seed": config.seed,
            "min_leaf": config.min_leaf,
            "bootstrap": config.bootstrap,
            "feature_subsample": config.feature_subsample,
        },
    )
