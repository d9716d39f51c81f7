"""Seeded synthetic dataset generator with planted linear structure.

Substitutes for the private production data. Each user draws a category
preference simplex and a log-uniform total, then spreads the total over
categories multinomially. Trait scores are a planted affine map of the
user's *realized* count proportions plus gaussian noise, clamped to [1, 5]
at the end — so with zero noise the scores are exactly linear in the
features the pipeline will build, and a regressor can in principle recover
them perfectly.

Planted coefficients default to uniform draws in [-2, 2] around intercept 3,
which keeps every noiseless score inside the scale (a convex combination of
coefficients can never leave [1, 5]); clamping then only ever acts on noise.
The generator also reports the oracle RMSE floor: the planted map evaluated
on its own data, which is what any fitted model is chasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import SCALE_MAX, SCALE_MIN, TRAITS, Big5Scores, CategoryPath, Dataset, UserRecord
from .errors import InvalidSpecError
from .features import FeatureMatrix
from .sampling import RNG_NAME

NOISE_CONSTANT = "constant"
NOISE_INVERSE_VOLUME = "inverse_volume"
NOISE_MODES = (NOISE_CONSTANT, NOISE_INVERSE_VOLUME)

COEF_BOUND = 2.0
INTERCEPT = 3.0


@dataclass(frozen=True)
class SyntheticSpec:
    n_users: int
    n_categories: int
    likes_min: int = 10
    likes_max: int = 500
    noise_sigma: float = 0.1
    seed: int = 0
    preference_alpha: float = 0.3
    shared_preferences: bool = False
    noise_mode: str = NOISE_CONSTANT
    coefficients: tuple | None = None  # (5, n_categories) nested tuples
    intercepts: tuple | None = None    # (5,)

    def __post_init__(self):
        if self.n_users < 2:
            raise InvalidSpecError(f"n_users must be >= 2, got {self.n_users}")
        if self.n_categories < 1:
            raise InvalidSpecError(f"n_categories must be >= 1, got {self.n_categories}")
        if not (1 <= self.likes_min <= self.likes_max):
            raise InvalidSpecError(
                f"need 1 <= likes_min <= likes_max, got [{self.likes_min}, {self.likes_max}]"
            )
        if not (self.noise_sigma >= 0):
            raise InvalidSpecError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.preference_alpha <= 0:
            raise InvalidSpecError("preference_alpha must be > 0")
        if self.noise_mode not in NOISE_MODES:
            raise InvalidSpecError(f"noise_mode must be one of {NOISE_MODES}")
        if self.coefficients is not None:
            arr = np.asarray(self.coefficients, dtype=np.float64)
            if arr.shape != (5, self.n_categories):
                raise InvalidSpecError(
                    f"coefficients must have shape (5, {self.n_categories}), got {arr.shape}"
                )
        if self.intercepts is not None:
            arr = np.asarray(self.intercepts, dtype=np.float64)
            if arr.shape != (5,):
                raise InvalidSpecError(f"intercepts must have shape (5,), got {arr.shape}")

    _FIELDS = (
        "n_users", "n_categories", "likes_min", "likes_max", "noise_sigma",
        "seed", "preference_alpha", "shared_preferences", "noise_mode",
        "coefficients", "intercepts",
    )

    @classmethod
    def from_json_dict(cls, data: dict) -> "SyntheticSpec":
        if not isinstance(data, dict):
            raise InvalidSpecError("synthetic spec must be a JSON object")
        unknown = set(data) - set(cls._FIELDS)
        if unknown:
            raise InvalidSpecError(f"unknown spec fields: {sorted(unknown)}")
        if "n_users" not in data or "n_categories" not in data:
            raise InvalidSpecError("spec requires n_users and n_categories")
        kwargs = dict(data)
        for key in ("coefficients", "intercepts"):
            if kwargs.get(key) is not None:
                kwargs[key] = _to_nested_tuple(kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidSpecError(f"bad spec value: {exc}") from exc

    def to_json_dict(self) -> dict:
        return {
            "n_users": self.n_users,
            "n_categories": self.n_categories,
            "likes_min": self.likes_min,
            "likes_max": self.likes_max,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "preference_alpha": self.preference_alpha,
            "shared_preferences": self.shared_preferences,
            "noise_mode": self.noise_mode,
            "coefficients": _to_nested_list(self.coefficients),
            "intercepts": _to_nested_list(self.intercepts),
        }

    def with_seed(self, seed: int) -> "SyntheticSpec":
        return replace(self, seed=seed)


def _to_nested_tuple(value):
    if isinstance(value, (list, tuple)):
        return tuple(_to_nested_tuple(v) for v in value)
    return value


def _to_nested_list(value):
    if isinstance(value, tuple):
        return [_to_nested_list(v) for v in value]
    return value


@dataclass(frozen=True)
class SyntheticTruth:
    """Everything needed to score models against the planted structure."""

    spec: SyntheticSpec
    categories: tuple[CategoryPath, ...]
    coefficients: np.ndarray   # (5, n_categories)
    intercepts: np.ndarray     # (5,)
    oracle_rmse: dict = field(default_factory=dict)     # trait -> float
    oracle_rmse_se: dict = field(default_factory=dict)  # trait -> float

    def planted_predictions(self, trait: str, matrix: FeatureMatrix) -> np.ndarray:
        """Clamped planted-map predictions for the rows of a feature matrix.

        The matrix space must be a subset of the generator's categories.
        """
        t = TRAITS.index(trait)
        index = {path: i for i, path in enumerate(self.categories)}
        w = np.zeros(matrix.space.dimension)
        for j, path in enumerate(matrix.space.paths):
            if path not in index:
                raise KeyError(f"category {path.label!r} was not generated")
            w[j] = self.coefficients[t, index[path]]
        raw = self.intercepts[t] + matrix.X @ w
        return np.clip(raw, SCALE_MIN, SCALE_MAX)

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "categories": [p.label for p in self.categories],
            "coefficients": self.coefficients.tolist(),
            "intercepts": self.intercepts.tolist(),
            "oracle_rmse": dict(self.oracle_rmse),
            "oracle_rmse_se": dict(self.oracle_rmse_se),
            "rng": RNG_NAME,
        }


def generate_synthetic(spec: SyntheticSpec) -> tuple[Dataset, SyntheticTruth]:
    """Deterministically generate (dataset, truth) from a spec."""
    rng = np.random.default_rng(spec.seed)
    K = spec.n_categories
    pad = max(2, len(str(K - 1)))
    categories = tuple(CategoryPath(f"cat_{i:0{pad}d}") for i in range(K))
    upad = max(4, len(str(spec.n_users - 1)))

    if spec.coefficients is not None:
        coef = np.asarray(spec.coefficients, dtype=np.float64)
    else:
        coef = rng.uniform(-COEF_BOUND, COEF_BOUND, size=(5, K))
    if spec.intercepts is not None:
        intercepts = np.asarray(spec.intercepts, dtype=np.float64)
    else:
        intercepts = np.full(5, INTERCEPT)

    alpha = np.full(K, spec.preference_alpha)
    shared = rng.dirichlet(alpha) if spec.shared_preferences else None
    log_min, log_max = math.log(spec.likes_min), math.log(spec.likes_max)
    t_ref = math.sqrt(spec.likes_min * spec.likes_max)

    users = []
    errors = np.zeros((spec.n_users, 5))
    for u in range(spec.n_users):
        preference = shared if shared is not None else rng.dirichlet(alpha)
        total = int(round(math.exp(rng.uniform(log_min, log_max))))
        total = min(max(total, spec.likes_min), spec.likes_max)
        counts = rng.multinomial(total, preference)
        proportions = counts / total
        if spec.noise_mode == NOISE_INVERSE_VOLUME:
            sigma_u = spec.noise_sigma * math.sqrt(t_ref / total)
        else:
            sigma_u = spec.noise_sigma
        noise = sigma_u * rng.standard_normal(5)
        planted = intercepts + coef @ proportions
        raw = planted + noise
        clipped = np.clip(raw, SCALE_MIN, SCALE_MAX)
        errors[u] = np.clip(planted, SCALE_MIN, SCALE_MAX) - clipped
        like_counts = {
            categories[j]: int(c) for j, c in enumerate(counts) if c > 0
        }
        users.append(
            UserRecord(f"u{u:0{upad}d}", Big5Scores(*clipped.tolist()), like_counts)
        )

    oracle_rmse = {}
    oracle_rmse_se = {}
    for t, trait in enumerate(TRAITS):
        sq = errors[:, t] ** 2
        mse = float(np.mean(sq))
        rmse = math.sqrt(mse)
        oracle_rmse[trait] = rmse
        if rmse > 0:
            se_mse = float(np.std(sq)) / math.sqrt(len(sq))
            oracle_rmse_se[trait] = se_mse / (2.0 * rmse)
        else:
            oracle_rmse_se[trait] = 0.0

    truth = SyntheticTruth(
        spec=spec,
        categories=categories,
        coefficients=coef,
        intercepts=intercepts,
        oracle_rmse=oracle_rmse,
        oracle_rmse_se=oracle_rmse_se,
    )
    return Dataset(tuple(users)), truth
