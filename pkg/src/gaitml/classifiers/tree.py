"""Entropy-based decision trees: a C4.5-style pruned tree and random trees.

Numeric attributes only. Splits are binary thresholds at midpoints between
adjacent distinct values; candidates must leave min_leaf rows on each side and
carry strictly positive information gain.
"""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np

from .base import J48Spec, TrainedClassifier

_GAIN_EPS = 1e-12


class TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "counts")

    def __init__(self, counts, feature=None, threshold=None, left=None, right=None):
        self.counts = counts  # class counts of the training rows reaching this node
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def leaf_for(self, x: np.ndarray) -> "TreeNode":
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def to_dict(self) -> dict:
        d = {"counts": [int(c) for c in self.counts]}
        if not self.is_leaf:
            d.update(
                feature=int(self.feature),
                threshold=float(self.threshold),
                left=self.left.to_dict(),
                right=self.right.to_dict(),
            )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        counts = np.array(d["counts"], dtype=float)
        if "feature" not in d:
            return cls(counts)
        return cls(
            counts,
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _best_threshold(col, y, n_classes, min_leaf):
    """Best threshold for one feature: (gain, split_info, threshold) or None.

    Vectorized sweep over sorted values with cumulative class counts.
    """
    order = np.argsort(col, kind="stable")
    sv = col[order]
    sy = y[order]
    n = len(sy)
    boundaries = np.nonzero(sv[:-1] != sv[1:])[0]
    if boundaries.size == 0:
        return None
    one_hot = np.zeros((n, n_classes))
    one_hot[np.arange(n), sy] = 1.0
    cum = np.cumsum(one_hot, axis=0)

    left = cum[boundaries]
    total = cum[-1]
    right = total - left
    n_left = boundaries + 1.0
    n_right = n - n_left
    valid = (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None

    with np.errstate(divide="ignore", invalid="ignore"):
        pl = left / n_left[:, None]
        pr = right / n_right[:, None]
        h_left = -np.sum(np.where(pl > 0, pl * np.log2(pl), 0.0), axis=1)
        h_right = -np.sum(np.where(pr > 0, pr * np.log2(pr), 0.0), axis=1)
    h_parent = _entropy(total)
    gains = h_parent - (n_left * h_left + n_right * h_right) / n
    gains[~valid] = -1.0

    best = int(np.argmax(gains))
    if gains[best] <= _GAIN_EPS:
        return None
    wl = n_left[best] / n
    split_info = -(wl * math.log2(wl) + (1 - wl) * math.log2(1 - wl))
    threshold = (sv[boundaries[best]] + sv[boundaries[best] + 1]) / 2.0
    return gains[best], split_info, threshold


def build_tree(X, y, n_classes, min_leaf=2, use_gain_ratio=True, feature_rng=None, n_sub=None):
    """Recursive top-down induction; gain-ratio selection follows C4.5
    (only splits with at least average positive gain compete by ratio).

    feature_rng/n_sub restrict each node to a random feature subset
    (random-forest mode).
    """
    counts = np.bincount(y, minlength=n_classes).astype(float)
    n = len(y)
    if n < 2 * min_leaf or np.count_nonzero(counts) <= 1:
        return TreeNode(counts)

    d = X.shape[1]
    if feature_rng is not None and n_sub is not None and n_sub < d:
        feats = feature_rng.choice(d, size=n_sub, replace=False)
    else:
        feats = np.arange(d)

    candidates = []
    for f in feats:
        found = _best_threshold(X[:, f], y, n_classes, min_leaf)
        if found is not None:
            gain, split_info, threshold = found
            candidates.append((int(f), gain, split_info, threshold))
    if not candidates:
        return TreeNode(counts)

    if use_gain_ratio:
        avg_gain = sum(c[1] for c in candidates) / len(candidates)
        eligible = [c for c in candidates if c[1] >= avg_gain - _GAIN_EPS]
        best = max(eligible, key=lambda c: (c[1] / c[2] if c[2] > 0 else 0.0, -c[0]))
    else:
        best = max(candidates, key=lambda c: (c[1], -c[0]))

    feature, _, _, threshold = best[0], best[1], best[2], best[3]
    mask = X[:, feature] <= threshold
    left = build_tree(X[mask], y[mask], n_classes, min_leaf, use_gain_ratio, feature_rng, n_sub)
    right = build_tree(X[~mask], y[~mask], n_classes, min_leaf, use_gain_ratio, feature_rng, n_sub)
    return TreeNode(counts, feature=feature, threshold=threshold, left=left, right=right)


def _pessimistic_errors(n: float, errors: float, z: float, confidence: float) -> float:
    """C4.5 upper bound on the leaf error count at the given confidence."""
    if n == 0:
        return 0.0
    if errors == 0:
        return n * (1.0 - confidence ** (1.0 / n))
    f = errors / n
    num = f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))
    return n * num / (1.0 + z * z / n)


def prune_tree(node: TreeNode, z: float, confidence: float) -> TreeNode:
    """Bottom-up subtree replacement by the pessimistic-error criterion."""
    if node.is_leaf:
        return node
    node.left = prune_tree(node.left, z, confidence)
    node.right = prune_tree(node.right, z, confidence)
    subtree_err = _subtree_errors(node, z, confidence)
    n = node.counts.sum()
    leaf_err = _pessimistic_errors(n, n - node.counts.max(), z, confidence)
    if leaf_err <= subtree_err + 0.1:
        return TreeNode(node.counts)
    return node


def _subtree_errors(node: TreeNode, z: float, confidence: float) -> float:
    if node.is_leaf:
        n = node.counts.sum()
        return _pessimistic_errors(n, n - node.counts.max(), z, confidence)
    return _subtree_errors(node.left, z, confidence) + _subtree_errors(node.right, z, confidence)


class J48Model(TrainedClassifier):
    """Pruned C4.5-style tree behind the common predict contract."""

    def __init__(self, spec: J48Spec, classes: list, n_features: int, root: TreeNode):
        self.spec = spec
        self.classes = classes
        self.n_features = n_features
        self.root = root

    @classmethod
    def fit(cls, spec: J48Spec, X: np.ndarray, y_idx: np.ndarray, classes: list) -> "J48Model":
        root = build_tree(X, y_idx, len(classes), min_leaf=spec.min_leaf, use_gain_ratio=True)
        z = NormalDist().inv_cdf(1.0 - spec.confidence)
        root = prune_tree(root, z, spec.confidence)
        return cls(spec, classes, X.shape[1], root)

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = self._check_vector(x)
        counts = self.root.leaf_for(x).counts
        total = counts.sum()
        return counts / total if total > 0 else counts

    def to_dict(self) -> dict:
        return {
            "spec": {"confidence": self.spec.confidence, "min_leaf": self.spec.min_leaf},
            "n_features": self.n_features,
            "root": self.root.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict, classes: list) -> "J48Model":
        spec = J48Spec(**d["spec"])
        return cls(spec, classes, d["n_features"], TreeNode.from_dict(d["root"]))
