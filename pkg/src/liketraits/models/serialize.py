"""Versioned JSON serialization for every model kind.

Documents carry ``format_version`` 1 and the shape
``{format_version, kind, feature_space, trait, hyperparameters, parameters}``.
Floats round-trip exactly through JSON (shortest-repr encoding), so a loaded
model predicts bit-identically to the one saved.
"""

from __future__ import annotations

import json

import numpy as np

from ..core import FeatureSpace
from ..errors import CorruptDocumentError, UnsupportedVersionError
from ._tree import Tree
from .boosting import BoostedTreesModel
from .forest import ForestClassifier
from .knn import KnnModel, support_set
from .linear import LinearModel
from .mlp import MlpModel

FORMAT_VERSION = 1


def _parameters(model) -> dict:
    if isinstance(model, LinearModel):
        return {"intercept": model.intercept, "coef": model.coef.tolist()}
    if isinstance(model, BoostedTreesModel):
        return {
            "base_prediction": model.base_prediction,
            "learning_rate": model.learning_rate,
            "trees": [t.to_jsonable() for t in model.trees],
        }
    if isinstance(model, KnnModel):
        return {"X": model.X.tolist(), "y": model.y.tolist()}
    if isinstance(model, MlpModel):
        return {
            "W1": model.W1.tolist(),
            "b1": model.b1.tolist(),
            "w2": model.w2.tolist(),
            "b2": model.b2,
        }
    if isinstance(model, ForestClassifier):
        return {
            "n_classes": model.n_classes,
            "trees": [t.to_jsonable() for t in model.trees],
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_to_doc(model) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "feature_space": model.feature_space.to_jsonable(),
        "trait": model.trait,
        "hyperparameters": model.hyperparameters,
        "parameters": _parameters(model),
    }


def model_from_doc(doc: dict):
    if not isinstance(doc, dict):
        raise CorruptDocumentError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported format_version {version!r}")
    try:
        kind = doc["kind"]
        space = FeatureSpace.from_jsonable(doc["feature_space"])
        trait = doc["trait"]
        hyper = doc["hyperparameters"]
        params = doc["parameters"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptDocumentError(f"bad model document: {exc}") from exc
    try:
        if kind == "linear":
            return LinearModel(
                feature_space=space,
                trait=trait,
                intercept=float(params["intercept"]),
                coef=np.asarray(params["coef"], dtype=np.float64),
                hyperparameters=hyper,
            )
        if kind == "boosted_trees":
            return BoostedTreesModel(
                feature_space=space,
                trait=trait,
                base_prediction=float(params["base_prediction"]),
                trees=[Tree.from_jsonable(t) for t in params["trees"]],
                learning_rate=float(params["learning_rate"]),
                hyperparameters=hyper,
            )
        if kind == "knn":
            X = np.asarray(params["X"], dtype=np.float64)
            if X.ndim == 1:  # degenerate single-dimension storage
                X = X.reshape(len(params["X"]), -1)
            return KnnModel(
                feature_space=space,
                trait=trait,
                X=X,
                y=np.asarray(params["y"], dtype=np.float64),
                support=support_set(X),
                k=int(hyper["k"]),
                penalty=float(hyper["penalty"]),
                hyperparameters=hyper,
            )
        if kind == "mlp":
            return MlpModel(
                feature_space=space,
                trait=trait,
                W1=np.asarray(params["W1"], dtype=np.float64),
                b1=np.asarray(params["b1"], dtype=np.float64),
                w2=np.asarray(params["w2"], dtype=np.float64),
                b2=float(params["b2"]),
                hyperparameters=hyper,
            )
        if kind == "forest_classifier":
            return ForestClassifier(
                feature_space=space,
                trait=trait,
                trees=[Tree.from_jsonable(t) for t in params["trees"]],
                n_classes=int(params["n_classes"]),
                hyperparameters=hyper,
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptDocumentError(f"bad {kind!r} parameters: {exc}") from exc
    raise CorruptDocumentError(f"unknown model kind {kind!r}")


def save_model(model, fp) -> None:
    json.dump(model_to_doc(model), fp, indent=2)
    fp.write("\n")


def load_model(fp):
    try:
        doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise CorruptDocumentError(f"not valid JSON: {exc}") from exc
    return model_from_doc(doc)


# --- bundles: one model per trait in a single document -----------------------

def save_bundle(models: dict, fp) -> None:
    """Serialize a {trait: model} mapping as one document."""
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "bundle",
        "models": {trait: model_to_doc(m) for trait, m in models.items()},
    }
    json.dump(doc, fp, indent=2)
    fp.write("\n")


def load_any(fp):
    """Load either a single model or a bundle; returns {trait: model}."""
    try:
        doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise CorruptDocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CorruptDocumentError("model document must be a JSON object")
    if doc.get("kind") == "bundle":
        if doc.get("format_version") != FORMAT_VERSION:
            raise UnsupportedVersionError(
                f"unsupported format_version {doc.get('format_version')!r}"
            )
        models = doc.get("models")
        if not isinstance(models, dict):
            raise CorruptDocumentError("bundle misses its models mapping")
        return {trait: model_from_doc(sub) for trait, sub in models.items()}
    model = model_from_doc(doc)
    return {model.trait: model}
