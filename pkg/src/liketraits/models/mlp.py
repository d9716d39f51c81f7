"""Single-hidden-layer perceptron regressor trained by mini-batch gradient
descent on squared loss.

Weights initialize uniformly in +-sqrt(6 / (fan_in + fan_out)), biases at
zero. Shuffling is seeded, so training is fully reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import FeatureSpace
from ..errors import DegenerateInputError
from ..features import FeatureMatrix


@dataclass(frozen=True)
class MlpConfig:
    hidden_width: int = 16
    epochs: int = 200
    step: float = 0.01
    batch: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.hidden_width < 1:
            raise ValueError("hidden_width must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.step <= 0 or self.batch < 1:
            raise ValueError("step must be > 0 and batch >= 1")


@dataclass
class MlpModel:
    kind = "mlp"
    feature_space: FeatureSpace
    trait: str
    W1: np.ndarray   # (hidden, dim)
    b1: np.ndarray   # (hidden,)
    w2: np.ndarray   # (hidden,)
    b2: float
    hyperparameters: dict = field(default_factory=dict)
    # Full-train loss per epoch (index 0 = at initialization); not serialized.
    training_loss: list[float] | None = None

    @property
    def dimension(self) -> int:
        return self.W1.shape[1]

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        hidden = np.maximum(X @ self.W1.T + self.b1, 0.0)
        return hidden @ self.w2 + self.b2

    def loss(self, X: np.ndarray, y: np.ndarray) -> float:
        """Mean squared error of the raw (unclamped) output."""
        err = self.predict_raw(X) - y
        return float(np.mean(err * err))

    def gradients(self, X: np.ndarray, y: np.ndarray):
        """Analytic gradients of :meth:`loss` w.r.t. (W1, b1, w2, b2)."""
        n = X.shape[0]
        z = X @ self.W1.T + self.b1
        hidden = np.maximum(z, 0.0)
        out = hidden @ self.w2 + self.b2
        dout = 2.0 * (out - y) / n
        dw2 = hidden.T @ dout
        db2 = float(np.sum(dout))
        dhidden = np.outer(dout, self.w2)
        dz = np.where(z > 0, dhidden, 0.0)
        dW1 = dz.T @ X
        db1 = dz.sum(axis=0)
        return dW1, db1, dw2, db2


def _init_model(space: FeatureSpace, trait: str, config: MlpConfig) -> MlpModel:
    rng = np.random.default_rng(config.seed)
    dim = space.dimension
    h = config.hidden_width
    lim1 = np.sqrt(6.0 / (dim + h))
    lim2 = np.sqrt(6.0 / (h + 1))
    return MlpModel(
        feature_space=space,
        trait=trait,
        W1=rng.uniform(-lim1, lim1, size=(h, dim)),
        b1=np.zeros(h),
        w2=rng.uniform(-lim2, lim2, size=h),
        b2=0.0,
        hyperparameters={
            "hidden_width": config.hidden_width,
            "epochs": config.epochs,
            "step": config.step,
            "batch": config.batch,
            "seed": config.seed,
        },
    )


def fit_mlp(train: FeatureMatrix, trait: str, config: MlpConfig | dict | None = None) -> MlpModel:
    if train.n_rows == 0:
        raise DegenerateInputError("cannot fit on zero rows")
    if config is None:
        config = MlpConfig()
    elif isinstance(config, dict):
        config = MlpConfig(**config)
    X = train.X
    y = train.trait_values(trait)
    n = X.shape[0]

    model = _init_model(train.space, trait, config)
    rng = np.random.default_rng(config.seed)
    curve = [model.loss(X, y)]
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch):
            rows = order[start : start + config.batch]
            dW1, db1, dw2, db2 = model.gradients(X[rows], y[rows])
            model.W1 -= config.step * dW1
            model.b1 -= config.step * db1
            model.w2 -= config.step * dw2
            model.b2 -= config.step * db2
        curve.append(model.loss(X, y))
    model.training_loss = curve
    return model
