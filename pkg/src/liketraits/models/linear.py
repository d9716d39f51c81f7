"""Least-squares linear regression solved by normal equations.

Relative features live on the probability simplex, which makes the design
matrix collinear with the intercept; the Gram matrix is then singular and a
tiny Tikhonov damping (1e-8 on the diagonal) is applied. Predictions are
unaffected at any tolerance that matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import FeatureSpace
from ..errors import DegenerateInputError
from ..features import FeatureMatrix

DAMPING = 1e-8
_COND_LIMIT = 1e12


@dataclass
class LinearModel:
    kind = "linear"
    feature_space: FeatureSpace
    trait: str
    intercept: float
    coef: np.ndarray  # (dimension,)
    hyperparameters: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.coef)

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        return self.intercept + X @ self.coef


def solve_normal_equations(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """theta = argmin ||[1 X] theta - y||^2 via the Gram system, damped when
    the Gram matrix is singular or numerically so."""
    A = np.hstack([np.ones((X.shape[0], 1)), X])
    gram = A.T @ A
    rhs = A.T @ y
    cond = np.linalg.cond(gram)
    if np.isfinite(cond) and cond < _COND_LIMIT:
        try:
            return np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            pass
    damped = gram + DAMPING * np.eye(gram.shape[0])
    return np.linalg.solve(damped, rhs)


def fit_linear(train: FeatureMatrix, trait: str, config: dict | None = None) -> LinearModel:
    if train.n_rows == 0:
        raise DegenerateInputError("cannot fit on zero rows")
    y = train.trait_values(trait)
    theta = solve_normal_equations(train.X, y)
    return LinearModel(
        feature_space=train.space,
        trait=trait,
        intercept=float(theta[0]),
        coef=theta[1:].copy(),
        hyperparameters={},
    )
