"""Train/test splitting: random, trait-stratified, and fixed-size draws.

All size arithmetic rounds to nearest with ties to even, and all randomness
flows through ``numpy.random.default_rng`` (PCG64) seeded from the spec, so
identical inputs produce bit-identical partitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SCALE_MAX, SCALE_MIN, TRAITS
from .errors import InsufficientRowsError, TooFewRowsError
from .features import FeatureMatrix

METHOD_RANDOM = "random"
METHOD_STRATIFIED = "stratified"
METHODS = (METHOD_RANDOM, METHOD_STRATIFIED)

#: Pinned generator; recorded in run metadata so splits stay reproducible.
RNG_NAME = "numpy.random.Generator(PCG64)"


def round_half_even(x: float) -> int:
    """Round to nearest integer, ties to even (used for every size computation)."""
    return int(round(x))


@dataclass(frozen=True)
class SplitSpec:
    """How to carve a matrix into train and test."""

    test_fraction: float = 0.2
    method: str = METHOD_RANDOM
    strat_trait: str = "ope"
    n_buckets: int = 8
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError(f"test_fraction must be in (0,1), got {self.test_fraction}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.strat_trait not in TRAITS:
            raise ValueError(f"strat_trait must be one of {TRAITS}, got {self.strat_trait!r}")
        if self.n_buckets < 1:
            raise ValueError(f"n_buckets must be >= 1, got {self.n_buckets}")


def _partition(matrix: FeatureMatrix, test_idx: np.ndarray):
    mask = np.zeros(matrix.n_rows, dtype=bool)
    mask[test_idx] = True
    train_idx = np.nonzero(~mask)[0]
    return matrix.subset(train_idx), matrix.subset(np.sort(test_idx))


def split_random(matrix: FeatureMatrix, spec: SplitSpec):
    """Uniform split: every row has the same chance of landing in test.

    Depends only on the row count and the seed, never on features or labels.
    """
    n = matrix.n_rows
    if n < 2:
        raise TooFewRowsError(f"need at least 2 rows to split, got {n}")
    n_test = round_half_even(n * spec.test_fraction)
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    return _partition(matrix, perm[:n_test])


def split_stratified(matrix: FeatureMatrix, spec: SplitSpec):
    """Bucket rows by one trait into equal-width bins over [1, 5], then draw
    round(bucket_size * test_fraction) test rows from each bucket.

    The top edge is inclusive; buckets are processed in ascending order with
    a single seeded generator, so the result is deterministic.
    """
    n = matrix.n_rows
    if n < 2:
        raise TooFewRowsError(f"need at least 2 rows to split, got {n}")
    values = matrix.trait_values(spec.strat_trait)
    width = (SCALE_MAX - SCALE_MIN) / spec.n_buckets
    buckets = np.clip(
        np.floor((values - SCALE_MIN) / width).astype(np.int64), 0, spec.n_buckets - 1
    )
    rng = np.random.default_rng(spec.seed)
    picks = []
    for b in range(spec.n_buckets):
        rows = np.nonzero(buckets == b)[0]
        if rows.size == 0:
            continue
        k = round_half_even(rows.size * spec.test_fraction)
        if k > 0:
            picks.append(rows[rng.permutation(rows.size)[:k]])
    test_idx = np.concatenate(picks) if picks else np.empty(0, dtype=np.int64)
    return _partition(matrix, test_idx)


def sample_fixed_train(matrix: FeatureMatrix, train_size: int, test_fraction: float, seed: int):
    """Draw the test set first (random split), then a uniform subset of the
    remainder with exactly ``train_size`` rows."""
    n = matrix.n_rows
    n_test = round_half_even(n * test_fraction)
    if train_size + n_test > n:
        raise InsufficientRowsError(
            f"train_size {train_size} + test {n_test} exceeds {n} rows"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test : n_test + train_size])
    return matrix.subset(train_idx), matrix.subset(test_idx)
