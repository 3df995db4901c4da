"""Window-parameter and PCA-component sweeps over a loaded cohort.

Grid cells are independent jobs dispatched to a process pool; output order is
fixed by the grid regardless of completion order, so reruns are byte-identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifiers import (
    ClassifierSpec,
    J48Spec,
    KnnSpec,
    LogisticSpec,
    MlpSpec,
    RandomForestSpec,
    SvmSpec,
    train,
)
from .domain import SensorRecording, SubjectProfile
from .evaluation import CvReport, cross_validate, make_folds, metrics
from .features import FeatureMatrix, apply_standardize, assemble_features, concat_matrices, fit_standardize
from .ingest import TruncationSpec, truncate_recording
from .pca import fit_pca, project
from .windowing import BoxWindow, GaussianWindow, WindowSpec

Cohort = list[tuple[SubjectProfile, SensorRecording]]

#: column order of the result tables (J48 first, logistic regression last)
CLASSIFIER_ORDER = ("j48", "mlp", "svm", "random_forest", "knn", "logistic_regression")

DEFAULT_SPECS: dict[str, ClassifierSpec] = {
    "j48": J48Spec(),
    "mlp": MlpSpec(),
    "svm": SvmSpec(),
    "random_forest": RandomForestSpec(),
    "knn": KnnSpec(),
    "logistic_regression": LogisticSpec(),
}

DEFAULT_GRID_VALUES = {
    ("bmi", "box"): (0.17, 0.33, 0.50, 0.67, 0.83, 1.00, 1.17),
    ("age", "box"): (0.17, 0.33, 0.50, 0.67, 0.83, 1.00, 1.11),
    ("bmi", "gaussian"): (0.06, 0.14, 0.22, 0.31, 0.36, 0.44, 0.56),
    ("age", "gaussian"): (0.08, 0.17, 0.25, 0.33, 0.42, 0.50, 0.56),
}

DEFAULT_PCA_COMPONENTS = tuple(range(1, 31))


def label_for_task(profile: SubjectProfile, task: str):
    if task == "bmi":
        return profile.bmi_category
    if task == "age":
        return profile.age_category
    raise ValueError(f"task must be 'bmi' or 'age', got {task!r}")


def make_window(kind: str, value: float) -> WindowSpec:
    if kind == "box":
        return BoxWindow(width_s=value)
    if kind == "gaussian":
        return GaussianWindow(sigma_s=value)
    raise ValueError(f"window kind must be 'box' or 'gaussian', got {kind!r}")


def cohort_matrix(
    cohort: Cohort,
    window: WindowSpec,
    task: str,
    truncation: TruncationSpec | None = None,
) -> FeatureMatrix:
    """Truncate, window and featurize every recording; labels follow `task`."""
    parts = []
    for profile, rec in cohort:
        if truncation is not None and (truncation.head_s > 0 or truncation.tail_s > 0):
            rec = truncate_recording(rec, truncation)
        parts.append(assemble_features(rec, window, label_for_task(profile, task)))
    return concat_matrices(parts)


@dataclass(frozen=True)
class SweepGrid:
    task: str
    window_kind: str
    values: tuple[float, ...] = ()
    classifiers: tuple[str, ...] = CLASSIFIER_ORDER
    pca_components: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.task not in ("bmi", "age"):
            raise ValueError(f"task must be 'bmi' or 'age', got {self.task!r}")
        if self.window_kind not in ("box", "gaussian"):
            raise ValueError(f"window kind must be 'box' or 'gaussian', got {self.window_kind!r}")
        if not self.values:
            object.__setattr__(
                self, "values", DEFAULT_GRID_VALUES[(self.task, self.window_kind)]
            )
        if any(v <= 0 for v in self.values) or any(
            a >= b for a, b in zip(self.values, self.values[1:])
        ):
            raise ValueError(f"grid values must be positive and strictly increasing: {self.values}")
        unknown = set(self.classifiers) - set(CLASSIFIER_ORDER)
        if unknown:
            raise ValueError(f"unknown classifiers: {sorted(unknown)}")
        # keep the table's column order regardless of request order
        object.__setattr__(
            self,
            "classifiers",
            tuple(c for c in CLASSIFIER_ORDER if c in self.classifiers),
        )


@dataclass(frozen=True)
class SweepRow:
    task: str
    window_kind: str
    param_s: float
    classifier: str
    accuracy: float | None
    macro_tpr: float | None
    error: str | None = None
    best: bool = False


@dataclass
class SweepReport:
    rows: list[SweepRow] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["task,param_s,classifier,accuracy_pct,macro_tpr_pct,best,error"]
        for r in self.rows:
            acc = f"{100.0 * r.accuracy:.2f}" if r.accuracy is not None else "NA"
            tpr = f"{100.0 * r.macro_tpr:.2f}" if r.macro_tpr is not None else "NA"
            lines.append(
                f"{r.task},{r.param_s},{r.classifier},{acc},{tpr},"
                f"{int(r.best)},{r.error or ''}"
            )
        return "\n".join(lines) + "\n"

    def row(self, param_s: float, classifier: str) -> SweepRow:
        for r in self.rows:
            if r.param_s == param_s and r.classifier == classifier:
                return r
        raise KeyError((param_s, classifier))


def _extract_job(args):
    index, cohort, kind, value, task, truncation = args
    try:
        return index, cohort_matrix(cohort, make_window(kind, value), task, truncation), None
    except ValueError as exc:
        return index, None, str(exc)


def _cv_job(args):
    index, matrix, name, k, mode, seed, pca_components = args
    try:
        plan = make_folds(matrix.labels, groups=matrix.subject_ids, k=k, mode=mode, seed=seed)
        report = cross_validate(
            matrix, DEFAULT_SPECS[name], plan, pca_components=pca_components, seed=seed
        )
        return index, (report.accuracy, report.macro_tpr), None
    except (ValueError, RuntimeError) as exc:
        return index, None, str(exc)


def _run_jobs(worker, jobs, workers: int | None):
    if workers is None:
        workers = max(1, os.cpu_count() or 1)
    if workers == 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(worker, jobs))


def run_window_sweep(
    cohort: Cohort,
    grid: SweepGrid,
    k: int = 10,
    mode: str = "segment",
    seed: int = 0,
    truncation: TruncationSpec | None = None,
    workers: int | None = None,
) -> SweepReport:
    """Extract features and cross-validate every (window value, classifier) cell."""
    extract_jobs = [
        (i, cohort, grid.window_kind, value, grid.task, truncation)
        for i, value in enumerate(grid.values)
    ]
    matrices: dict[int, FeatureMatrix | None] = {}
    extract_errors: dict[int, str | None] = {}
    for index, matrix, error in _run_jobs(_extract_job, extract_jobs, workers):
        matrices[index], extract_errors[index] = matrix, error

    cv_jobs = []
    for vi, value in enumerate(grid.values):
        if matrices[vi] is None:
            continue
        for ci, name in enumerate(grid.classifiers):
            cv_jobs.append(((vi, ci), matrices[vi], name, k, mode, seed, None))
    results: dict[tuple[int, int], tuple] = {}
    cv_errors: dict[tuple[int, int], str | None] = {}
    for index, result, error in _run_jobs(_cv_job, cv_jobs, workers):
        results[index], cv_errors[index] = result, error

    rows = []
    for vi, value in enumerate(grid.values):
        for ci, name in enumerate(grid.classifiers):
            if matrices[vi] is None:
                rows.append(
                    SweepRow(grid.task, grid.window_kind, value, name, None, None,
                             error=extract_errors[vi])
                )
            elif results.get((vi, ci)) is None:
                rows.append(
                    SweepRow(grid.task, grid.window_kind, value, name, None, None,
                             error=cv_errors.get((vi, ci), "failed"))
                )
            else:
                acc, tpr = results[(vi, ci)]
                rows.append(SweepRow(grid.task, grid.window_kind, value, name, acc, tpr))
    return SweepReport(rows=_flag_best(rows))


def _flag_best(rows: list[SweepRow]) -> list[SweepRow]:
    best: dict[str, tuple[float, float]] = {}
    for r in rows:
        if r.accuracy is None:
            continue
        incumbent = best.get(r.classifier)
        if incumbent is None or r.accuracy > incumbent[0]:
            best[r.classifier] = (r.accuracy, r.param_s)
    out = []
    for r in rows:
        flag = r.accuracy is not None and best.get(r.classifier, (None, None))[1] == r.param_s
        out.append(SweepRow(r.task, r.window_kind, r.param_s, r.classifier,
                            r.accuracy, r.macro_tpr, r.error, flag))
    return out


def evaluate_cell(
    cohort: Cohort,
    window: WindowSpec,
    task: str,
    spec: ClassifierSpec,
    k: int = 10,
    mode: str = "segment",
    seed: int = 0,
    truncation: TruncationSpec | None = None,
    pca_components: int | None = None,
) -> CvReport:
    """One full cross-validated evaluation (the CLI `evaluate` path)."""
    matrix = cohort_matrix(cohort, window, task, truncation)
    plan = make_folds(matrix.labels, groups=matrix.subject_ids, k=k, mode=mode, seed=seed)
    kind = "box" if isinstance(window, BoxWindow) else "gaussian"
    return cross_validate(
        matrix,
        spec,
        plan,
        pca_components=pca_components,
        seed=seed,
        window={"kind": kind, "param_s": window.param_s},
    )


def _pca_fold_job(args):
    fold, matrix_features, train_mask = args
    x_train = matrix_features[train_mask]
    x_test = matrix_features[~train_mask]
    std = fit_standardize(x_train)
    x_train = apply_standardize(std, x_train)
    x_test = apply_standardize(std, x_test)
    pca = fit_pca(x_train, std)
    return fold, (project(pca, x_train, x_train.shape[1]), project(pca, x_test, x_test.shape[1]))


def _pca_cv_job(args):
    index, name, n_components, folds_data, n_classes = args
    confusion = np.zeros((n_classes, n_classes))
    for x_train, x_test, y_train, y_test, fold_seed in folds_data:
        model = train(
            DEFAULT_SPECS[name], x_train[:, :n_components], list(y_train), seed=fold_seed
        )
        for t, p in zip(y_test, model.predict_matrix(x_test[:, :n_components])):
            confusion[t, p] += 1
    return index, metrics(confusion)["accuracy"], None


@dataclass
class PcaSweepResult:
    task: str
    window_kind: str
    param_s: float
    curves: dict[str, list[tuple[int, float]]]
    plateaus: dict[str, int]

    def to_csv(self) -> str:
        lines = ["classifier,n_components,accuracy_pct"]
        for name in self.curves:
            for n, acc in self.curves[name]:
                lines.append(f"{name},{n},{100.0 * acc:.2f}")
        return "\n".join(lines) + "\n"


def plateau_component(curve: list[tuple[int, float]], epsilon: float = 0.01) -> int:
    """Smallest component count whose accuracy is within epsilon of the best."""
    if not curve:
        raise ValueError("empty curve")
    peak = max(acc for _, acc in curve)
    for n, acc in sorted(curve):
        if acc >= peak - epsilon:
            return n
    raise AssertionError("unreachable: the peak itself qualifies")


def run_pca_sweep(
    cohort: Cohort,
    window: WindowSpec,
    task: str,
    components: tuple[int, ...] = DEFAULT_PCA_COMPONENTS,
    classifiers: tuple[str, ...] = ("knn",),
    k: int = 10,
    mode: str = "segment",
    seed: int = 0,
    truncation: TruncationSpec | None = None,
    workers: int | None = None,
) -> PcaSweepResult:
    """Accuracy as a function of retained components, per classifier.

    Standardization and the component basis are fitted once per fold and
    shared across the component grid (projections onto the top n components
    are prefixes of the full projection).
    """
    if any(c < 1 for c in components):
        raise ValueError("component counts must be >= 1")
    matrix = cohort_matrix(cohort, window, task, truncation)
    if max(components) > matrix.n_features:
        raise ValueError(f"components exceed {matrix.n_features} features: {max(components)}")
    names = tuple(c for c in CLASSIFIER_ORDER if c in classifiers)
    plan = make_folds(matrix.labels, groups=matrix.subject_ids, k=k, mode=mode, seed=seed)
    classes = sorted(set(matrix.labels))
    index_of = {lab: i for i, lab in enumerate(classes)}
    y_idx = np.array([index_of[lab] for lab in matrix.labels], dtype=np.intp)

    fold_jobs = [(fold, matrix.features, plan.assignment != fold) for fold in range(plan.k)]
    projected: dict[int, tuple] = {}
    for fold, payload in _run_jobs(_pca_fold_job, fold_jobs, workers):
        projected[fold] = payload

    folds_data = []
    for fold in range(plan.k):
        train_mask = plan.assignment != fold
        x_train, x_test = projected[fold]
        folds_data.append((x_train, x_test, y_idx[train_mask], y_idx[~train_mask], seed + fold))

    cv_jobs = [
        ((name, n), name, n, folds_data, len(classes))
        for name in names
        for n in components
    ]
    accuracy: dict[tuple[str, int], float] = {}
    for idx, acc, _ in _run_jobs(_pca_cv_job, cv_jobs, workers):
        accuracy[idx] = acc

    curves = {
        name: [(n, accuracy[(name, n)]) for n in sorted(components)] for name in names
    }
    kind = "box" if isinstance(window, BoxWindow) else "gaussian"
    return PcaSweepResult(
        task=task,
        window_kind=kind,
        param_s=window.param_s,
        curves=curves,
        plateaus={name: plateau_component(curve) for name, curve in curves.items()},
    )
