"""Stratified 10-fold cross-validation with per-fold standardization/PCA.

Two folding modes: "segment" shuffles rows freely (windows of one subject may
land in train and test, matching the reproduction protocol), "subject" keeps
every subject's rows in a single fold.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .classifiers import ClassifierSpec, needs_standardization, train
from .features import FeatureMatrix, apply_standardize, fit_standardize
from .pca import fit_pca, project


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: np.ndarray  # row index -> fold id
    mode: str
    seed: int

    def test_rows(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignment == fold)[0]


def make_folds(labels, groups=None, k: int = 10, mode: str = "segment", seed: int = 0) -> FoldPlan:
    """Deal rows (or whole subjects) to k folds, stratified by class.

    Classes are dealt round-robin starting where the previous class stopped,
    so per-fold class counts and fold sizes each differ by at most one unit.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if mode not in ("segment", "subject"):
        raise ValueError(f"mode must be 'segment' or 'subject', got {mode!r}")
    labels = list(labels)
    n = len(labels)
    rng = np.random.default_rng(seed)
    assignment = np.full(n, -1, dtype=np.intp)
    classes = sorted(set(labels))

    if mode == "segment":
        offset = 0
        for cls in classes:
            rows = np.array([i for i, lab in enumerate(labels) if lab == cls])
            if len(rows) < k:
                raise ValueError(f"class {cls!r} has {len(rows)} rows, needs >= {k}")
            rows = rows[rng.permutation(len(rows))]
            assignment[rows] = (offset + np.arange(len(rows))) % k
            offset = (offset + len(rows)) % k
        return FoldPlan(k=k, assignment=assignment, mode=mode, seed=seed)

    if groups is None or len(groups) != n:
        raise ValueError("subject mode needs one group id per row")
    subject_label: dict = {}
    for g, lab in zip(groups, labels):
        if subject_label.setdefault(g, lab) != lab:
            raise ValueError(f"subject {g!r} carries multiple labels")
    subject_fold: dict = {}
    offset = 0
    for cls in classes:
        subjects = sorted(g for g, lab in subject_label.items() if lab == cls)
        if len(subjects) < k:
            raise ValueError(f"class {cls!r} has {len(subjects)} subjects, needs >= {k}")
        order = rng.permutation(len(subjects))
        for pos, si in enumerate(order):
            subject_fold[subjects[si]] = (offset + pos) % k
        offset = (offset + len(subjects)) % k
    for i, g in enumerate(groups):
        assignment[i] = subject_fold[g]
    return FoldPlan(k=k, assignment=assignment, mode=mode, seed=seed)


def metrics(confusion: np.ndarray) -> dict:
    """Accuracy, per-class TPR (recall) and macro TPR from a confusion matrix.

    Rows are true classes, columns predictions. Classes without support have
    undefined TPR (None) and are excluded from the macro average.
    """
    confusion = np.asarray(confusion, dtype=float)
    total = confusion.sum()
    if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1] or total == 0:
        raise ValueError("confusion matrix must be square and non-empty")
    support = confusion.sum(axis=1)
    tpr = [
        (confusion[i, i] / support[i]) if support[i] > 0 else None
        for i in range(confusion.shape[0])
    ]
    defined = [t for t in tpr if t is not None]
    return {
        "accuracy": float(np.trace(confusion) / total),
        "per_class_tpr": tpr,
        "macro_tpr": float(np.mean(defined)) if defined else 0.0,
    }


@dataclass
class CvReport:
    classes: list[str]
    k: int
    mode: str
    seed: int
    per_fold_accuracy: list[float]
    accuracy: float
    per_class_tpr: list[float | None]
    macro_tpr: float
    confusion: np.ndarray
    classifier: dict = field(default_factory=dict)
    window: dict | None = None

    def to_json(self) -> str:
        doc = {
            "classes": self.classes,
            "k": self.k,
            "mode": self.mode,
            "seed": self.seed,
            "per_fold_accuracy": self.per_fold_accuracy,
            "accuracy": self.accuracy,
            "per_class_tpr": self.per_class_tpr,
            "macro_tpr": self.macro_tpr,
            "confusion": self.confusion.astype(int).tolist(),
            "classifier": self.classifier,
            "window": self.window,
        }
        return json.dumps(doc, sort_keys=True)

    def confusion_csv(self) -> str:
        lines = ["true\\predicted," + ",".join(self.classes)]
        for name, row in zip(self.classes, self.confusion.astype(int)):
            lines.append(name + "," + ",".join(str(v) for v in row))
        return "\n".join(lines) + "\n"


def _class_name(label) -> str:
    return label.name if hasattr(label, "name") else str(label)


def cross_validate(
    matrix: FeatureMatrix,
    spec: ClassifierSpec,
    plan: FoldPlan,
    pca_components: int | None = None,
    seed: int = 0,
    window: dict | None = None,
) -> CvReport:
    """Train/test on every fold; all fitting happens on training rows only."""
    if len(plan.assignment) != matrix.n_rows:
        raise ValueError("fold plan does not cover this matrix")
    classes = sorted(set(matrix.labels))
    index = {lab: i for i, lab in enumerate(classes)}
    labels = np.array([index[lab] for lab in matrix.labels], dtype=np.intp)
    confusion = np.zeros((len(classes), len(classes)))
    per_fold = []
    standardize = needs_standardization(spec) or pca_components is not None
    for fold in range(plan.k):
        test_mask = plan.assignment == fold
        train_mask = ~test_mask
        x_train, x_test = matrix.features[train_mask], matrix.features[test_mask]
        y_train = [matrix.labels[i] for i in np.nonzero(train_mask)[0]]
        y_test = labels[test_mask]
        try:
            if standardize:
                std = fit_standardize(x_train)
                x_train = apply_standardize(std, x_train)
                x_test = apply_standardize(std, x_test)
            if pca_components is not None:
                pca = fit_pca(x_train, std)
                x_train = project(pca, x_train, pca_components)
                x_test = project(pca, x_test, pca_components)
            model = train(spec, x_train, y_train, seed=seed + fold)
            predictions = model.predict_matrix(x_test)
        except ValueError as exc:
            raise RuntimeError(f"training failed in fold {fold}: {exc}") from exc
        pred_idx = np.array([index[p] for p in predictions], dtype=np.intp)
        for t, p in zip(y_test, pred_idx):
            confusion[t, p] += 1
        per_fold.append(float(np.mean(pred_idx == y_test)))
    summary = metrics(confusion)
    return CvReport(
        classes=[_class_name(c) for c in classes],
        k=plan.k,
        mode=plan.mode,
        seed=plan.seed,
        per_fold_accuracy=per_fold,
        accuracy=summary["accuracy"],
        per_class_tpr=summary["per_class_tpr"],
        macro_tpr=summary["macro_tpr"],
        confusion=confusion,
        classifier={"kind": type(spec).__name__, **asdict(spec)},
        window=window,
    )
