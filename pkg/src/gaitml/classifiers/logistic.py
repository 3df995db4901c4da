"""One-vs-all logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

import numpy as np

from .base import LogisticSpec, TrainedClassifier
from .mlp import one_hot, sigmoid


class LogisticModel(TrainedClassifier):
    def __init__(self, spec: LogisticSpec, classes: list, W: np.ndarray, b: np.ndarray):
        self.spec = spec
        self.classes = classes
        self.n_features = W.shape[0]
        self.W = W
        self.b = b

    @classmethod
    def fit(
        cls, spec: LogisticSpec, X: np.ndarray, y_idx: np.ndarray, classes: list
    ) -> "LogisticModel":
        n, d = X.shape
        c = len(classes)
        T = one_hot(y_idx, c)
        W = np.zeros((d, c))
        b = np.zeros(c)
        for _ in range(spec.epochs):
            P = sigmoid(X @ W + b)
            residual = (P - T) / n
            grad_w = X.T @ residual + spec.l2 * W
            grad_b = residual.sum(axis=0)
            norm = np.sqrt(np.sum(grad_w * grad_w) + np.sum(grad_b * grad_b))
            if norm < spec.grad_tol:
                break
            W -= spec.learning_rate * grad_w
            b -= spec.learning_rate * grad_b
        return cls(spec, classes, W, b)

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = self._check_vector(x)
        return sigmoid(x @ self.W + self.b)

    def predict_matrix(self, X: np.ndarray) -> list:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} columns, got {X.shape[1]}")
        out = sigmoid(X @ self.W + self.b)
        return [self.classes[i] for i in np.argmax(out, axis=1)]

    def to_dict(self) -> dict:
        return {
            "spec": {
                "l2": self.spec.l2,
                "learning_rate": self.spec.learning_rate,
                "epochs": self.spec.epochs,
                "grad_tol": self.spec.grad_tol,
            },
            "n_features": self.n_features,
            "weights": self.W.tolist(),
            "bias": self.b.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict, classes: list) -> "LogisticModel":
        return cls(
            LogisticSpec(**d["spec"]),
            classes,
            np.array(d["weights"], dtype=float).reshape(d["n_features"], -1),
            np.array(d["bias"], dtype=float),
        )
