"""Single-hidden-layer perceptron: sigmoid units, squared-error loss,
per-sample gradient descent with momentum in fixed row order."""

from __future__ import annotations

import numpy as np

from .base import MlpSpec, TrainedClassifier


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def one_hot(y_idx: np.ndarray, n_classes: int) -> np.ndarray:
    t = np.zeros((len(y_idx), n_classes))
    t[np.arange(len(y_idx)), y_idx] = 1.0
    return t


class MlpModel(TrainedClassifier):
    """Weights are stored augmented: w1 is (d+1, h), w2 is (h+1, c); the last
    input row of each carries the bias."""

    def __init__(self, spec: MlpSpec, classes: list, n_features: int, w1, w2):
        self.spec = spec
        self.classes = classes
        self.n_features = n_features
        self.w1 = w1
        self.w2 = w2
        self.epoch_losses: list[float] = []

    @classmethod
    def fit(
        cls, spec: MlpSpec, X: np.ndarray, y_idx: np.ndarray, classes: list, seed: int
    ) -> "MlpModel":
        n, d = X.shape
        c = len(classes)
        h = spec.hidden_units or (d + c + 1) // 2  # half of attributes+classes, rounded up
        rng = np.random.default_rng(seed)
        model = cls(
            spec,
            classes,
            d,
            w1=rng.uniform(-0.5, 0.5, size=(d + 1, h)),
            w2=rng.uniform(-0.5, 0.5, size=(h + 1, c)),
        )
        model._train(X, one_hot(y_idx, c))
        return model

    def _train(self, X: np.ndarray, T: np.ndarray) -> None:
        spec = self.spec
        n = X.shape[0]
        h = self.w1.shape[1]
        x_aug = np.hstack([X, np.ones((n, 1))])
        a1_aug = np.ones(h + 1)
        v1 = np.zeros_like(self.w1)
        v2 = np.zeros_like(self.w2)
        lr, mom = spec.learning_rate, spec.momentum
        for epoch in range(spec.epochs):
            for i in range(n):
                xi = x_aug[i]
                a1 = sigmoid(xi @ self.w1)
                a1_aug[:h] = a1
                a2 = sigmoid(a1_aug @ self.w2)
                d2 = (a2 - T[i]) * a2 * (1.0 - a2)
                d1 = (self.w2[:h] @ d2) * a1 * (1.0 - a1)
                v2 *= mom
                v2 -= lr * np.outer(a1_aug, d2)
                self.w2 += v2
                v1 *= mom
                v1 -= lr * np.outer(xi, d1)
                self.w1 += v1
            self.epoch_losses.append(self.batch_loss(X, T))
            if self._converged():
                break

    def _converged(self) -> bool:
        p = self.spec.patience
        if self.spec.loss_tol <= 0 or len(self.epoch_losses) <= p:
            return False
        previous, current = self.epoch_losses[-1 - p], self.epoch_losses[-1]
        return previous - current <= self.spec.loss_tol * max(previous, 1e-12)

    def _forward(self, X: np.ndarray) -> np.ndarray:
        a1 = sigmoid(X @ self.w1[:-1] + self.w1[-1])
        return sigmoid(a1 @ self.w2[:-1] + self.w2[-1])

    def batch_loss(self, X: np.ndarray, T: np.ndarray) -> float:
        """Summed squared-error loss 1/2 sum of (output - target)^2."""
        err = self._forward(X) - T
        return 0.5 * float(np.sum(err * err))

    def batch_gradients(self, X: np.ndarray, T: np.ndarray):
        """Analytic gradients of batch_loss wrt (w1, w2); used for grad checks."""
        n = X.shape[0]
        h = self.w1.shape[1]
        x_aug = np.hstack([X, np.ones((n, 1))])
        a1 = sigmoid(x_aug @ self.w1)
        a1_aug = np.hstack([a1, np.ones((n, 1))])
        a2 = sigmoid(a1_aug @ self.w2)
        d2 = (a2 - T) * a2 * (1.0 - a2)
        d1 = (d2 @ self.w2[:h].T) * a1 * (1.0 - a1)
        return x_aug.T @ d1, a1_aug.T @ d2

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = self._check_vector(x)
        return self._forward(x[None, :])[0]

    def predict_matrix(self, X: np.ndarray) -> list:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} columns, got {X.shape[1]}")
        out = self._forward(X)
        return [self.classes[i] for i in np.argmax(out, axis=1)]

    def to_dict(self) -> dict:
        return {
            "spec": {
                "learning_rate": self.spec.learning_rate,
                "momentum": self.spec.momentum,
                "epochs": self.spec.epochs,
                "hidden_units": self.spec.hidden_units,
                "loss_tol": self.spec.loss_tol,
                "patience": self.spec.patience,
            },
            "n_features": self.n_features,
            "w1": self.w1.tolist(),
            "w2": self.w2.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict, classes: list) -> "MlpModel":
        return cls(
            MlpSpec(**d["spec"]),
            classes,
            d["n_features"],
            np.array(d["w1"]),
            np.array(d["w2"]),
        )
