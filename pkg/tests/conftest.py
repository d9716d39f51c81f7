import numpy as np
import pytest

from liketraits.core import TRAITS, Big5Scores, CategoryPath, Dataset, FeatureSpace, UserRecord
from liketraits.features import FeatureMatrix


def make_matrix(X, y, trait="ope"):
    """FeatureMatrix over synthetic dimensions with y planted in one trait."""
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    space = FeatureSpace(tuple(CategoryPath(f"c{i:02d}") for i in range(d)))
    scores = np.full((n, 5), 3.0)
    scores[:, TRAITS.index(trait)] = np.asarray(y, dtype=np.float64)
    return FeatureMatrix(
        space=space,
        user_ids=tuple(f"u{i:04d}" for i in range(n)),
        X=X,
        scores=scores,
        totals=np.full(n, 10, dtype=np.int64),
    )


@pytest.fixture
def tiny_dataset():
    """Three users over three category paths."""
    sports = CategoryPath("Sports")
    boxing = CategoryPath("Sports", "Boxing Studio")
    politics = CategoryPath("Politics")
    mid = Big5Scores(3.0, 3.0, 3.0, 3.0, 3.0)
    return Dataset(
        (
            UserRecord("u1", Big5Scores(3.5, 2.0, 4.0, 3.0, 1.5), {sports: 300, politics: 30}),
            UserRecord("u2", mid, {boxing: 7}),
            UserRecord("u3", mid, {}),
        )
    )
