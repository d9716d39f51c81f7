"""Feature construction: category counts -> normalized proportion vectors.

Relative mode places every user on the probability simplex (count / total),
so a user with 30 politics likes out of 330 gets 30/330 in the politics
dimension. Absolute mode keeps raw counts and exists only to measure what
that normalization buys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TRAITS, CategoryPath, Dataset, FeatureSpace, UserRecord
from .errors import EmptyDatasetError, UnknownCategoryError, ZeroTotalError

#: Feature value modes.
MODE_RELATIVE = "relative"
MODE_ABSOLUTE = "absolute"
MODES = (MODE_RELATIVE, MODE_ABSOLUTE)

#: Which taxonomy levels become feature dimensions.
TAXONOMY_BOTH = "both"
TAXONOMY_CATEGORY_ONLY = "category_only"
TAXONOMY_SUBCATEGORY_ONLY = "subcategory_only"
TAXONOMIES = (TAXONOMY_BOTH, TAXONOMY_CATEGORY_ONLY, TAXONOMY_SUBCATEGORY_ONLY)


def remap_counts(counts: dict[CategoryPath, int], taxonomy: str) -> dict[CategoryPath, int]:
    """Collapse count keys to the chosen taxonomy level.

    ``both`` keeps (category, subcategory) pairs as-is. ``category_only``
    merges everything under the top-level category. ``subcategory_only``
    promotes the subcategory to a top-level key, falling back to the
    category for likes that have no subcategory.
    """
    if taxonomy == TAXONOMY_BOTH:
        return counts
    out: dict[CategoryPath, int] = {}
    for path, count in counts.items():
        if taxonomy == TAXONOMY_CATEGORY_ONLY:
            key = CategoryPath(path.category)
        elif taxonomy == TAXONOMY_SUBCATEGORY_ONLY:
            key = CategoryPath(path.subcategory or path.category)
        else:
            raise ValueError(f"unknown taxonomy mode {taxonomy!r}")
        out[key] = out.get(key, 0) + count
    return out


def apply_taxonomy(dataset: Dataset, taxonomy: str) -> Dataset:
    """Return a dataset whose count keys follow the chosen taxonomy level."""
    if taxonomy == TAXONOMY_BOTH:
        return dataset
    return Dataset(
        tuple(
            UserRecord(u.user_id, u.scores, remap_counts(u.like_counts, taxonomy))
            for u in dataset
        )
    )


def build_feature_space(dataset: Dataset) -> FeatureSpace:
    """Space over exactly the categories present in the dataset, sorted."""
    if len(dataset) == 0:
        raise EmptyDatasetError("cannot build a feature space from zero users")
    return FeatureSpace.from_categories(dataset.categories())


def filter_min_likes(dataset: Dataset, threshold: int) -> Dataset:
    """Keep users with total_likes >= threshold. The input is untouched."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    return Dataset(tuple(u for u in dataset if u.total_likes >= threshold))


def normalize_counts(counts: dict[CategoryPath, int], space: FeatureSpace) -> np.ndarray:
    """Proportion vector over the space: entry = count / total.

    Raises :class:`ZeroTotalError` when the user has no likes (callers filter
    first) and :class:`UnknownCategoryError` for keys outside the space.
    """
    total = sum(counts.values())
    if total <= 0:
        raise ZeroTotalError("user has zero likes; filter before normalizing")
    vec = np.zeros(space.dimension, dtype=np.float64)
    for path, count in counts.items():
        idx = space.index.get(path)
        if idx is None:
            raise UnknownCategoryError(f"category {path.label!r} not in feature space")
        vec[idx] = count / total
    return vec


def absolute_counts(counts: dict[CategoryPath, int], space: FeatureSpace) -> np.ndarray:
    """Raw counts cast to reals, aligned to the space."""
    vec = np.zeros(space.dimension, dtype=np.float64)
    for path, count in counts.items():
        idx = space.index.get(path)
        if idx is None:
            raise UnknownCategoryError(f"category {path.label!r} not in feature space")
        vec[idx] = float(count)
    return vec


def drop_unknown(counts: dict[CategoryPath, int], space: FeatureSpace) -> dict[CategoryPath, int]:
    """Prediction-time helper: discard count keys the space has no dimension
    for, so the remainder renormalizes to 1."""
    return {p: c for p, c in counts.items() if p in space}


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Dense per-user feature rows plus their trait labels.

    Rows are ordered by lexicographic user id; ``scores`` columns follow
    :data:`liketraits.core.TRAITS`.
    """

    space: FeatureSpace
    user_ids: tuple[str, ...]
    X: np.ndarray        # (n, dimension) float64
    scores: np.ndarray   # (n, 5) float64
    totals: np.ndarray   # (n,) int64

    @property
    def n_rows(self) -> int:
        return len(self.user_ids)

    def trait_values(self, trait: str) -> np.ndarray:
        return self.scores[:, TRAITS.index(trait)]

    def subset(self, indices) -> "FeatureMatrix":
        idx = np.asarray(indices, dtype=np.int64)
        return FeatureMatrix(
            space=self.space,
            user_ids=tuple(self.user_ids[i] for i in idx),
            X=self.X[idx],
            scores=self.scores[idx],
            totals=self.totals[idx],
        )

    def write_csv(self, fp) -> None:
        """Dump as `userid,total_likes,<category columns...>,ope,con,ext,agr,neu`."""
        columns = [p.label for p in self.space.paths]
        fp.write("userid,total_likes," + ",".join(columns) + "," + ",".join(TRAITS) + "\n")
        for i, uid in enumerate(self.user_ids):
            feats = ",".join(repr(v) for v in self.X[i].tolist())
            traits = ",".join(repr(v) for v in self.scores[i].tolist())
            fp.write(f"{uid},{int(self.totals[i])},{feats},{traits}\n")


def build_matrix(
    dataset: Dataset,
    space: FeatureSpace,
    threshold: int = 1,
    mode: str = MODE_RELATIVE,
) -> FeatureMatrix:
    """Filter by min likes, then turn each remaining user into a feature row.

    The filter runs first, so with any threshold >= 1 normalization never
    sees a zero-total user.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    kept = sorted(filter_min_likes(dataset, threshold), key=lambda u: u.user_id)
    n = len(kept)
    X = np.zeros((n, space.dimension), dtype=np.float64)
    scores = np.zeros((n, 5), dtype=np.float64)
    totals = np.zeros(n, dtype=np.int64)
    for i, user in enumerate(kept):
        if mode == MODE_RELATIVE:
            X[i] = normalize_counts(user.like_counts, space)
        else:
            X[i] = absolute_counts(user.like_counts, space)
        scores[i] = user.scores.as_array()
        totals[i] = user.total_likes
    return FeatureMatrix(
        space=space,
        user_ids=tuple(u.user_id for u in kept),
        X=X,
        scores=scores,
        totals=totals,
    )
