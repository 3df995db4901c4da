"""k-nearest-neighbor classification: Euclidean distance, majority vote.

Distance ties resolve toward the earlier training row (stable sort), vote
ties toward the lower class index.
"""

from __future__ import annotations

import numpy as np

from .base import KnnSpec, TrainedClassifier


class KnnModel(TrainedClassifier):
    def __init__(self, spec: KnnSpec, classes: list, X: np.ndarray, y_idx: np.ndarray):
        if spec.k > X.shape[0]:
            raise ValueError(f"k={spec.k} exceeds {X.shape[0]} training rows")
        self.spec = spec
        self.classes = classes
        self.n_features = X.shape[1]
        self.X = X
        self.y_idx = y_idx

    @classmethod
    def fit(cls, spec: KnnSpec, X: np.ndarray, y_idx: np.ndarray, classes: list) -> "KnnModel":
        return cls(spec, classes, X.copy(), y_idx.copy())

    def _vote(self, sq_dists: np.ndarray) -> np.ndarray:
        nearest = np.argsort(sq_dists, kind="stable")[: self.spec.k]
        counts = np.bincount(self.y_idx[nearest], minlength=len(self.classes))
        return counts.astype(float) / self.spec.k

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = self._check_vector(x)
        diff = self.X - x
        return self._vote(np.einsum("ij,ij->i", diff, diff))

    def predict_matrix(self, X: np.ndarray) -> list:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} columns, got {X.shape[1]}")
        # squared distances via the expansion |a-b|^2 = |a|^2 - 2ab + |b|^2,
        # clamped at 0 against cancellation
        sq = (
            np.sum(X * X, axis=1)[:, None]
            - 2.0 * (X @ self.X.T)
            + np.sum(self.X * self.X, axis=1)[None, :]
        )
        np.maximum(sq, 0.0, out=sq)
        labels = []
        for row in sq:
            labels.append(self.classes[int(np.argmax(self._vote(row)))])
        return labels

    def to_dict(self) -> dict:
        return {
            "spec": {"k": self.spec.k},
            "n_features": self.n_features,
            "train_x": self.X.tolist(),
            "train_y": self.y_idx.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict, classes: list) -> "KnnModel":
        return cls(
            KnnSpec(**d["spec"]),
            classes,
            np.array(d["train_x"], dtype=float).reshape(-1, d["n_features"]),
            np.array(d["train_y"], dtype=np.intp),
        )
