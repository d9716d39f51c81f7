"""liketraits: Big Five trait regression from page-like category proportions.

The pipeline: parse score and like tables, resolve like ids to page
categories, normalize per-user counts into proportion vectors, split,
fit one of four regressors (or a forest-classifier baseline), and report
RMSE per trait. A seeded synthetic generator with planted linear structure
stands in for production data.
"""

from .core import (
    SCALE_MAX,
    SCALE_MIN,
    TRAITS,
    Big5Scores,
    CategoryPath,
    Dataset,
    FeatureSpace,
    UserRecord,
    validate_scores,
)
from .features import FeatureMatrix, build_feature_space, build_matrix, filter_min_likes, normalize_counts
from .kernels import ACTIVE_BACKEND
from .metrics import (
    ClassificationReport,
    RegressionReport,
    compute_classification_metrics,
    compute_regression_metrics,
    evaluate,
)
from .sampling import SplitSpec, sample_fixed_train, split_random, split_stratified
from .synth import SyntheticSpec, SyntheticTruth, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND",
    "SCALE_MAX",
    "SCALE_MIN",
    "TRAITS",
    "Big5Scores",
    "CategoryPath",
    "ClassificationReport",
    "Dataset",
    "FeatureMatrix",
    "FeatureSpace",
    "RegressionReport",
    "SplitSpec",
    "SyntheticSpec",
    "SyntheticTruth",
    "UserRecord",
    "build_feature_space",
    "build_matrix",
    "compute_classification_metrics",
    "compute_regression_metrics",
    "evaluate",
    "filter_min_likes",
    "generate_synthetic",
    "normalize_counts",
    "sample_fixed_train",
    "split_random",
    "split_stratified",
    "validate_scores",
    "__version__",
]
