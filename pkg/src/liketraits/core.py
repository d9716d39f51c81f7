"""Shared domain types: trait scores, category paths, user records, feature spaces.

All types here are immutable after construction and safe to share across
threads. Trait scores live on the fixed [1, 5] scale; values outside it are
rejected at construction (predictions are clamped elsewhere, inputs never are).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateUserError,
    NonFiniteError,
    OutOfRangeError,
)

#: Canonical trait order used everywhere (scores arrays, reports, CLI output).
TRAITS = ("ope", "con", "ext", "agr", "neu")

SCALE_MIN = 1.0
SCALE_MAX = 5.0


@dataclass(frozen=True)
class Big5Scores:
    """Five trait values on the [1, 5] scale: openness, conscientiousness,
    extraversion, agreeableness, neuroticism."""

    ope: float
    con: float
    ext: float
    agr: float
    neu: float

    def __post_init__(self):
        for name in TRAITS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise NonFiniteError(f"trait {name!r} is not finite: {value!r}")
            if not (SCALE_MIN <= value <= SCALE_MAX):
                raise OutOfRangeError(
                    f"trait {name!r} = {value!r} outside [{SCALE_MIN}, {SCALE_MAX}]"
                )

    def get(self, trait: str) -> float:
        if trait not in TRAITS:
            raise KeyError(f"unknown trait {trait!r}")
        return getattr(self, trait)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.ope, self.con, self.ext, self.agr, self.neu)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)


def validate_scores(ope: float, con: float, ext: float, agr: float, neu: float) -> Big5Scores:
    """Validate five raw reals into a :class:`Big5Scores`.

    Values are preserved exactly; anything non-finite raises
    :class:`NonFiniteError`, anything outside [1, 5] raises
    :class:`OutOfRangeError`. Validation is idempotent.
    """
    return Big5Scores(float(ope), float(con), float(ext), float(agr), float(neu))


@dataclass(frozen=True)
class CategoryPath:
    """A page category plus optional subcategory from the platform taxonomy.

    Comparison is case-sensitive exact match: labels are canonical
    identifiers, not prose. Surrounding whitespace is trimmed on
    construction; an empty subcategory collapses to None.
    """

    category: str
    subcategory: str | None = None

    def __post_init__(self):
        cat = self.category.strip()
        if not cat:
            raise ValueError("category must be non-empty after trimming")
        object.__setattr__(self, "category", cat)
        if self.subcategory is not None:
            sub = self.subcategory.strip()
            object.__setattr__(self, "subcategory", sub if sub else None)

    @property
    def sort_key(self) -> tuple[str, bool, str]:
        # None subcategory sorts before any string.
        return (self.category, self.subcategory is not None, self.subcategory or "")

    @property
    def label(self) -> str:
        if self.subcategory is None:
            return self.category
        return f"{self.category}/{self.subcategory}"


@dataclass(frozen=True)
class UserRecord:
    """One user: opaque id, trait scores, and like counts per category path.

    ``like_counts`` is treated as read-only after construction.
    """

    user_id: str
    scores: Big5Scores
    like_counts: dict[CategoryPath, int] = field(default_factory=dict)

    def __post_init__(self):
        for path, count in self.like_counts.items():
            if count < 0:
                raise ValueError(f"negative like count for {path.label!r}: {count}")

    @property
    def total_likes(self) -> int:
        return sum(self.like_counts.values())


@dataclass(frozen=True)
class Dataset:
    """Joined collection of scored users with their per-category like counts."""

    users: tuple[UserRecord, ...]

    def __post_init__(self):
        seen = set()
        for user in self.users:
            if user.user_id in seen:
                raise DuplicateUserError(f"duplicate user id {user.user_id!r}")
            seen.add(user.user_id)

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self):
        return iter(self.users)

    def categories(self) -> set[CategoryPath]:
        paths: set[CategoryPath] = set()
        for user in self.users:
            paths.update(user.like_counts)
        return paths


class FeatureSpace:
    """Ordered mapping between category paths and feature dimensions.

    The order is lexicographic by (category, subcategory) with a missing
    subcategory sorting first, which makes every downstream artifact
    byte-reproducible.
    """

    __slots__ = ("paths", "index")

    def __init__(self, paths: tuple[CategoryPath, ...]):
        if len(set(paths)) != len(paths):
            raise ValueError("duplicate category path in feature space")
        self.paths = tuple(paths)
        self.index = {path: i for i, path in enumerate(self.paths)}

    @classmethod
    def from_categories(cls, paths) -> "FeatureSpace":
        """Build a space from any iterable of paths (dedup + sort)."""
        unique = sorted(set(paths), key=lambda p: p.sort_key)
        return cls(tuple(unique))

    @property
    def dimension(self) -> int:
        return len(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __contains__(self, path: CategoryPath) -> bool:
        return path in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureSpace) and self.paths == other.paths

    def __hash__(self):
        return hash(self.paths)

    def __repr__(self) -> str:
        return f"FeatureSpace(dimension={self.dimension})"

    def to_jsonable(self) -> list[list]:
        return [[p.category, p.subcategory] for p in self.paths]

    @classmethod
    def from_jsonable(cls, data) -> "FeatureSpace":
        return cls(tuple(CategoryPath(c, s) for c, s in data))
