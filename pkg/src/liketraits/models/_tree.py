"""Flat-array decision trees shared by gradient boosting and the forest.

A tree is four parallel node arrays plus a value array; ``feature[i] < 0``
marks node i as a leaf. Split thresholds are midpoints between consecutive
distinct sorted feature values; among equal-gain splits the lowest feature
index wins, then the lowest threshold, so growth is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass
class Tree:
    feature: np.ndarray    # (n_nodes,) int64, -1 for leaves
    threshold: np.ndarray  # (n_nodes,) float64
    left: np.ndarray       # (n_nodes,) int64
    right: np.ndarray      # (n_nodes,) int64
    value: np.ndarray      # (n_nodes,) float64: leaf mean (regression) or class

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(int(self.left[node])), walk(int(self.right[node])))

        return walk(0)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index per row."""
        return kernels.tree_apply(self.feature, self.threshold, self.left, self.right, X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_jsonable(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "Tree":
        return cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=np.float64),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=np.float64),
        )


class _Builder:
    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def finish(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
        )


def _candidate_features(dim: int, max_features: int | None, rng) -> np.ndarray:
    if max_features is None or max_features >= dim:
        return np.arange(dim, dtype=np.int64)
    # sorted so the lowest-index tie-break is preserved under subsampling
    return np.sort(rng.choice(dim, size=max_features, replace=False).astype(np.int64))


def grow_regression_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_leaf: int,
    max_features: int | None = None,
    rng=None,
) -> Tree:
    """Depth-limited SSE tree; leaves hold the mean target of their rows."""
    builder = _Builder()

    def build(rows: np.ndarray, depth: int) -> int:
        node = builder.add(float(np.mean(y[rows])))
        if depth >= max_depth or rows.size < 2 * min_leaf:
            return node
        feats = _candidate_features(X.shape[1], max_features, rng)
        f, thr, gain = kernels.best_split_sse(X[rows], y[rows], feats, min_leaf)
        if f < 0 or gain <= 0.0:
            return node
        go_left = X[rows, f] <= thr
        builder.feature[node] = int(f)
        builder.threshold[node] = float(thr)
        builder.left[node] = build(rows[go_left], depth + 1)
        builder.right[node] = build(rows[~go_left], depth + 1)
        return node

    build(np.arange(len(y), dtype=np.int64), 0)
    return builder.finish()


def grow_classification_tree(
    X: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    max_depth: int,
    min_leaf: int,
    max_features: int | None = None,
    rng=None,
) -> Tree:
    """Depth-limited gini tree; leaves hold the majority class (lowest class
    index on ties). Growth stops early once a node is pure."""
    builder = _Builder()

    def majority(rows: np.ndarray) -> int:
        return int(np.argmax(np.bincount(labels[rows], minlength=n_classes)))

    def build(rows: np.ndarray, depth: int) -> int:
        node = builder.add(float(majority(rows)))
        if depth >= max_depth or rows.size < 2 * min_leaf:
            return node
        node_labels = labels[rows]
        if np.all(node_labels == node_labels[0]):
            return node
        feats = _candidate_features(X.shape[1], max_features, rng)
        f, thr, gain = kernels.best_split_gini(
            X[rows], node_labels, feats, min_leaf, n_classes
        )
        if f < 0 or gain <= 0.0:
            return node
        go_left = X[rows, f] <= thr
        builder.feature[node] = int(f)
        builder.threshold[node] = float(thr)
        builder.left[node] = build(rows[go_left], depth + 1)
        builder.right[node] = build(rows[~go_left], depth + 1)
        return node

    build(np.arange(len(labels), dtype=np.int64), 0)
    return builder.finish()
