"""Soft-margin SVM trained by sequential minimal optimization (SMO).

Binary machines follow Platt's working-set heuristics (second choice by
maximum error difference, then seeded random scans) with a full error cache.
Multiclass classification trains one machine per unordered class pair and
votes. The kernel is the inhomogeneous polynomial (u.v + 1)^degree.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .base import SvmSpec, TrainedClassifier

_ALPHA_EPS = 1e-10
_KERNEL_CACHE_LIMIT = 40_000_000  # entries; above this, rows are computed on demand


def poly_kernel(U: np.ndarray, V: np.ndarray, degree: int) -> np.ndarray:
    return (U @ V.T + 1.0) ** degree


class BinarySmo:
    """One soft-margin machine for labels y in {-1, +1}."""

    def __init__(self, spec: SvmSpec, X: np.ndarray, y: np.ndarray, seed: int):
        self.spec = spec
        self.X = X
        self.y = y.astype(float)
        self.n = X.shape[0]
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self._rng = np.random.default_rng(seed)
        if self.n * self.n <= _KERNEL_CACHE_LIMIT:
            self._K = poly_kernel(X, X, spec.kernel_degree)
        else:
            self._K = None
        # error cache E[i] = f(x_i) - y_i; valid from alpha = 0, b = 0
        self.errors = -self.y.copy()

    def _krow(self, i: int) -> np.ndarray:
        if self._K is not None:
            return self._K[i]
        return poly_kernel(self.X, self.X[i : i + 1], self.spec.kernel_degree)[:, 0]

    def _kentry(self, i: int, j: int) -> float:
        if self._K is not None:
            return self._K[i, j]
        return float((self.X[i] @ self.X[j] + 1.0) ** self.spec.kernel_degree)

    def train(self) -> None:
        examine_all = True
        num_changed = 0
        passes = 0
        while (num_changed > 0 or examine_all) and passes < self.spec.max_passes:
            num_changed = 0
            if examine_all:
                for i in range(self.n):
                    num_changed += self._examine(i)
            else:
                for i in np.nonzero(self._non_bound())[0]:
                    num_changed += self._examine(int(i))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
            passes += 1

    def _non_bound(self) -> np.ndarray:
        return (self.alpha > _ALPHA_EPS) & (self.alpha < self.spec.c - _ALPHA_EPS)

    def _examine(self, i2: int) -> int:
        tol, c = self.spec.tol, self.spec.c
        y2, a2, e2 = self.y[i2], self.alpha[i2], self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -tol and a2 < c) or (r2 > tol and a2 > 0)):
            return 0
        non_bound = np.nonzero(self._non_bound())[0]
        if len(non_bound) > 1:
            i1 = int(non_bound[np.argmax(np.abs(self.errors[non_bound] - e2))])
            if self._step(i1, i2):
                return 1
        if len(non_bound) > 0:
            start = self._rng.integers(len(non_bound))
            for k in range(len(non_bound)):
                if self._step(int(non_bound[(start + k) % len(non_bound)]), i2):
                    return 1
        start = self._rng.integers(self.n)
        for k in range(self.n):
            if self._step(int((start + k) % self.n), i2):
                return 1
        return 0

    def _step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        c = self.spec.c
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if s > 0:
            lo, hi = max(0.0, a1 + a2 - c), min(c, a1 + a2)
        else:
            lo, hi = max(0.0, a2 - a1), min(c, c + a2 - a1)
        if lo >= hi:
            return False
        k11, k22, k12 = self._kentry(i1, i1), self._kentry(i2, i2), self._kentry(i1, i2)
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(hi, max(lo, a2_new))
        else:
            # degenerate curvature: evaluate the dual objective at both ends
            f1 = y1 * (e1 + self.b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (e2 + self.b) - s * a1 * k12 - a2 * k22
            l1 = a1 + s * (a2 - lo)
            h1 = a1 + s * (a2 - hi)
            obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12
            obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12
            if obj_lo < obj_hi - 1e-12:
                a2_new = lo
            elif obj_lo > obj_hi + 1e-12:
                a2_new = hi
            else:
                return False
        if abs(a2_new - a2) < _ALPHA_EPS * (a2_new + a2 + _ALPHA_EPS):
            return False
        a1_new = a1 + s * (a2 - a2_new)

        b1 = e1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12 + self.b
        b2 = e2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22 + self.b
        if _ALPHA_EPS < a1_new < c - _ALPHA_EPS:
            b_new = b1
        elif _ALPHA_EPS < a2_new < c - _ALPHA_EPS:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        self.errors += (
            y1 * (a1_new - a1) * self._krow(i1)
            + y2 * (a2_new - a2) * self._krow(i2)
            - (b_new - self.b)
        )
        self.alpha[i1] = a1_new
        self.alpha[i2] = a2_new
        self.b = b_new
        return True

    def decision_value(self, x: np.ndarray) -> float:
        sv = self.alpha > 0
        if not sv.any():
            return -self.b
        k = poly_kernel(self.X[sv], x[None, :], self.spec.kernel_degree)[:, 0]
        return float((self.alpha[sv] * self.y[sv]) @ k - self.b)

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        sv = self.alpha > 0
        if not sv.any():
            return np.full(X.shape[0], -self.b)
        k = poly_kernel(X, self.X[sv], self.spec.kernel_degree)
        return k @ (self.alpha[sv] * self.y[sv]) - self.b

    def kkt_violation(self) -> float:
        """Largest violation of the KKT conditions over the training set."""
        margins = self.y * self.decision_values(self.X)
        viol = np.zeros(self.n)
        at_zero = self.alpha <= _ALPHA_EPS
        at_c = self.alpha >= self.spec.c - _ALPHA_EPS
        interior = ~(at_zero | at_c)
        viol[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
        viol[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
        viol[interior] = np.abs(margins[interior] - 1.0)
        return float(viol.max())

    def shrink(self) -> None:
        """Keep only support vectors (training data no longer needed)."""
        sv = self.alpha > 0
        self.X = self.X[sv]
        self.y = self.y[sv]
        self.alpha = self.alpha[sv]
        self.n = int(sv.sum())
        self._K = None
        self.errors = np.empty(0)


class SvmModel(TrainedClassifier):
    """One-vs-one multiclass wrapper; scores are pairwise vote counts."""

    def __init__(self, spec: SvmSpec, classes: list, n_features: int, machines: dict):
        self.spec = spec
        self.classes = classes
        self.n_features = n_features
        self.machines = machines  # (i, j) with i < j -> BinarySmo; +1 means class i

    @classmethod
    def fit(
        cls, spec: SvmSpec, X: np.ndarray, y_idx: np.ndarray, classes: list, seed: int
    ) -> "SvmModel":
        machines = {}
        for pair_index, (i, j) in enumerate(combinations(range(len(classes)), 2)):
            mask = (y_idx == i) | (y_idx == j)
            y_pair = np.where(y_idx[mask] == i, 1.0, -1.0)
            machine = BinarySmo(spec, X[mask], y_pair, seed=seed + pair_index)
            machine.train()
            machine.shrink()
            machines[(i, j)] = machine
        return cls(spec, classes, X.shape[1], machines)

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = self._check_vector(x)
        votes = np.zeros(len(self.classes))
        for (i, j), machine in self.machines.items():
            votes[i if machine.decision_value(x) > 0 else j] += 1.0
        return votes

    def predict_matrix(self, X: np.ndarray) -> list:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} columns, got {X.shape[1]}")
        votes = np.zeros((X.shape[0], len(self.classes)))
        for (i, j), machine in self.machines.items():
            positive = machine.decision_values(X) > 0
            votes[positive, i] += 1.0
            votes[~positive, j] += 1.0
        return [self.classes[i] for i in np.argmax(votes, axis=1)]

    def to_dict(self) -> dict:
        return {
            "spec": {
                "kernel_degree": self.spec.kernel_degree,
                "c": self.spec.c,
                "tol": self.spec.tol,
                "max_passes": self.spec.max_passes,
            },
            "n_features": self.n_features,
            "machines": [
                {
                    "pair": [i, j],
                    "support_vectors": m.X.tolist(),
                    "sv_labels": m.y.tolist(),
                    "alpha": m.alpha.tolist(),
                    "b": m.b,
                }
                for (i, j), m in sorted(self.machines.items())
            ],
        }

    @classmethod
    def from_dict(cls, d: dict, classes: list) -> "SvmModel":
        spec = SvmSpec(**d["spec"])
        machines = {}
        for md in d["machines"]:
            m = BinarySmo.__new__(BinarySmo)
            m.spec = spec
            m.X = np.array(md["support_vectors"], dtype=float).reshape(-1, d["n_features"])
            m.y = np.array(md["sv_labels"], dtype=float)
            m.alpha = np.array(md["alpha"], dtype=float)
            m.b = md["b"]
            m.n = m.X.shape[0]
            m._K = None
            m.errors = np.empty(0)
            machines[tuple(md["pair"])] = m
        return cls(spec, classes, d["n_features"], machines)
