"""Six from-scratch classifiers behind one train/predict contract."""

from __future__ import annotations

import json

import numpy as np

from .base import (
    ClassifierSpec,
    J48Spec,
    KnnSpec,
    LogisticSpec,
    MlpSpec,
    RandomForestSpec,
    SvmSpec,
    TrainedClassifier,
    decode_label_json,
    encode_label_json,
    encode_labels,
    validate_training_data,
)
from .forest import RandomForestModel
from .knn import KnnModel
from .logistic import LogisticModel
from .mlp import MlpModel
from .svm import BinarySmo, SvmModel, poly_kernel
from .tree import J48Model

__all__ = [
    "ClassifierSpec",
    "J48Spec",
    "MlpSpec",
    "SvmSpec",
    "RandomForestSpec",
    "KnnSpec",
    "LogisticSpec",
    "TrainedClassifier",
    "J48Model",
    "MlpModel",
    "SvmModel",
    "BinarySmo",
    "RandomForestModel",
    "KnnModel",
    "LogisticModel",
    "poly_kernel",
    "train",
    "predict",
    "predict_scores",
    "model_to_json",
    "model_from_json",
    "needs_standardization",
]

MODEL_FORMAT = "gaitml-model/1"

_MODEL_KINDS = {
    J48Spec: ("j48", J48Model),
    MlpSpec: ("mlp", MlpModel),
    SvmSpec: ("svm", SvmModel),
    RandomForestSpec: ("random_forest", RandomForestModel),
    KnnSpec: ("knn", KnnModel),
    LogisticSpec: ("logistic", LogisticModel),
}


def train(spec: ClassifierSpec, X: np.ndarray, y, seed: int = 0) -> TrainedClassifier:
    """Fit the classifier selected by `spec`; deterministic for a fixed seed."""
    X = np.asarray(X, dtype=float)
    validate_training_data(X, y)
    classes, y_idx = encode_labels(y)
    if isinstance(spec, J48Spec):
        return J48Model.fit(spec, X, y_idx, classes)
    if isinstance(spec, MlpSpec):
        return MlpModel.fit(spec, X, y_idx, classes, seed)
    if isinstance(spec, SvmSpec):
        return SvmModel.fit(spec, X, y_idx, classes, seed)
    if isinstance(spec, RandomForestSpec):
        return RandomForestModel.fit(spec, X, y_idx, classes, seed)
    if isinstance(spec, KnnSpec):
        return KnnModel.fit(spec, X, y_idx, classes)
    if isinstance(spec, LogisticSpec):
        return LogisticModel.fit(spec, X, y_idx, classes)
    raise TypeError(f"unknown classifier spec: {spec!r}")


def predict(model: TrainedClassifier, x: np.ndarray):
    return model.predict(np.asarray(x, dtype=float))


def predict_scores(model: TrainedClassifier, x: np.ndarray) -> np.ndarray:
    return model.scores(np.asarray(x, dtype=float))


def needs_standardization(spec: ClassifierSpec) -> bool:
    """Distance/gradient learners consume z-scored features; trees are
    scale-invariant and take them raw."""
    return not isinstance(spec, (J48Spec, RandomForestSpec))


def model_to_json(model: TrainedClassifier) -> str:
    for spec_cls, (kind, model_cls) in _MODEL_KINDS.items():
        if isinstance(model, model_cls):
            return json.dumps(
                {
                    "format": MODEL_FORMAT,
                    "kind": kind,
                    "classes": [encode_label_json(c) for c in model.classes],
                    "model": model.to_dict(),
                },
                sort_keys=True,
            )
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_json(text: str) -> TrainedClassifier:
    doc = json.loads(text)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {doc.get('format')!r}")
    classes = [decode_label_json(c) for c in doc["classes"]]
    by_kind = {kind: model_cls for kind, model_cls in _MODEL_KINDS.values()}
    model_cls = by_kind.get(doc.get("kind"))
    if model_cls is None:
        raise ValueError(f"unknown model kind {doc.get('kind')!r}")
    return model_cls.from_dict(doc["model"], classes)
