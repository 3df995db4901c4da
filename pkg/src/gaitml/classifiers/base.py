"""Shared classifier contract: specs, label encoding and the predict surface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..domain import AgeCategory, BmiCategory


@dataclass(frozen=True)
class J48Spec:
    """C4.5-style pruned decision tree."""

    confidence: float = 0.25
    min_leaf: int = 2

    def __post_init__(self):
        if not (0 < self.confidence < 1):
            raise ValueError(f"confidence must be in (0, 1), got {self.confidence}")
        if self.min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {self.min_leaf}")


@dataclass(frozen=True)
class MlpSpec:
    """Single-hidden-layer sigmoid perceptron trained by per-sample backprop.

    hidden_units=None sizes the layer to half of attributes+classes. Training
    runs at most `epochs` passes; it stops early once the epoch loss has
    improved by less than loss_tol (relative) over `patience` epochs
    (loss_tol=0 disables the early stop).
    """

    learning_rate: float = 0.3
    momentum: float = 0.2
    epochs: int = 500
    hidden_units: int | None = None
    loss_tol: float = 1e-5
    patience: int = 10

    def __post_init__(self):
        if not (self.learning_rate > 0):
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0 <= self.momentum < 1):
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.hidden_units is not None and self.hidden_units < 1:
            raise ValueError(f"hidden_units must be >= 1, got {self.hidden_units}")


@dataclass(frozen=True)
class SvmSpec:
    """Soft-margin SVM with inhomogeneous polynomial kernel, trained by SMO.

    Multiclass problems train one machine per class pair and vote.
    """

    kernel_degree: int = 3
    c: float = 1.0
    tol: float = 1e-3
    max_passes: int = 200

    def __post_init__(self):
        if self.kernel_degree < 1:
            raise ValueError(f"kernel_degree must be >= 1, got {self.kernel_degree}")
        if not (self.c > 0):
            raise ValueError(f"C must be > 0, got {self.c}")
        if not (self.tol > 0):
            raise ValueError(f"tol must be > 0, got {self.tol}")


@dataclass(frozen=True)
class RandomForestSpec:
    """Bagged unpruned random trees voting by majority.

    features_per_split=None samples floor(log2(d)) + 1 features per node.
    """

    trees: int = 100
    features_per_split: int | None = None

    def __post_init__(self):
        if self.trees < 1:
            raise ValueError(f"trees must be >= 1, got {self.trees}")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError(f"features_per_split must be >= 1, got {self.features_per_split}")


@dataclass(frozen=True)
class KnnSpec:
    """k nearest neighbors by Euclidean distance, majority vote."""

    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class LogisticSpec:
    """One-vs-all logistic regression trained by batch gradient descent."""

    l2: float = 1e-8
    learning_rate: float = 0.01
    epochs: int = 2000
    grad_tol: float = 1e-6

    def __post_init__(self):
        if self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")
        if not (self.learning_rate > 0):
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


ClassifierSpec = J48Spec | MlpSpec | SvmSpec | RandomForestSpec | KnnSpec | LogisticSpec


def encode_labels(y) -> tuple[list, np.ndarray]:
    """Sorted class list and integer-encoded labels; class order fixes tie-breaks."""
    classes = sorted(set(y))
    index = {lab: i for i, lab in enumerate(classes)}
    return classes, np.array([index[lab] for lab in y], dtype=np.intp)


def validate_training_data(X: np.ndarray, y) -> None:
    if X.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {X.shape}")
    if len(y) != X.shape[0]:
        raise ValueError(f"{X.shape[0]} rows but {len(y)} labels")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    n_classes = len(set(y))
    if n_classes < 2:
        raise ValueError("training data contains a single class")
    if X.shape[0] < 2 * n_classes:
        raise ValueError(f"need at least {2 * n_classes} rows for {n_classes} classes")


class TrainedClassifier:
    """Common predict surface: argmax over per-class scores, lowest index wins ties."""

    classes: list
    n_features: int

    def scores(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, x: np.ndarray):
        return self.classes[int(np.argmax(self.scores(x)))]

    def predict_matrix(self, X: np.ndarray) -> list:
        X = np.asarray(X, dtype=float)
        return [self.predict(row) for row in X]

    def _check_vector(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected a {self.n_features}-vector, got shape {x.shape}")
        return x


def encode_label_json(label):
    if isinstance(label, (BmiCategory, AgeCategory)):
        return {"enum": type(label).__name__, "name": label.name}
    return {"value": label}


def decode_label_json(obj):
    if "enum" in obj:
        enum_cls = {"BmiCategory": BmiCategory, "AgeCategory": AgeCategory}[obj["enum"]]
        return enum_cls[obj["name"]]
    return obj["value"]
