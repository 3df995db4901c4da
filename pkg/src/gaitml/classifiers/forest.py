"""Random forest: bootstrap-bagged unpruned random trees, majority vote."""

from __future__ import annotations

import math

import numpy as np

from .base import RandomForestSpec, TrainedClassifier
from .tree import TreeNode, build_tree


class RandomForestModel(TrainedClassifier):
    def __init__(self, spec: RandomForestSpec, classes: list, n_features: int, roots: list):
        self.spec = spec
        self.classes = classes
        self.n_features = n_features
        self.roots = roots

    @classmethod
    def fit(
        cls,
        spec: RandomForestSpec,
        X: np.ndarray,
        y_idx: np.ndarray,
        classes: list,
        seed: int,
    ) -> "RandomForestModel":
        n, d = X.shape
        n_sub = spec.features_per_split or (int(math.floor(math.log2(d))) + 1)
        n_sub = min(n_sub, d)
        roots = []
        for t in range(spec.trees):
            rng = np.random.default_rng(seed + t)  # per-tree stream
            rows = rng.integers(0, n, size=n)
            roots.append(
                build_tree(
                    X[rows],
                    y_idx[rows],
                    len(classes),
                    min_leaf=1,
                    use_gain_ratio=False,
                    feature_rng=rng,
                    n_sub=n_sub,
                )
            )
        return cls(spec, classes, d, roots)

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = self._check_vector(x)
        votes = np.zeros(len(self.classes))
        for root in self.roots:
            counts = root.leaf_for(x).counts
            votes[int(np.argmax(counts))] += 1.0
        return votes / len(self.roots)

    def to_dict(self) -> dict:
        return {
            "spec": {
                "trees": self.spec.trees,
                "features_per_split": self.spec.features_per_split,
            },
            "n_features": self.n_features,
            "roots": [r.to_dict() for r in self.roots],
        }

    @classmethod
    def from_dict(cls, d: dict, classes: list) -> "RandomForestModel":
        spec = RandomForestSpec(**d["spec"])
        return cls(spec, classes, d["n_features"], [TreeNode.from_dict(r) for r in d["roots"]])
