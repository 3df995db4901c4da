"""Command-line front end: synth, extract, sweep-window, sweep-pca, evaluate, spectra.

Exit codes: 0 success, 1 usage error, 2 data/IO error. All randomness hangs
off --seed; reruns with identical flags produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ingest, sweeps, synth
from .evaluation import make_folds  # noqa: F401  (re-exported for scripting)
from .windowing import BoxWindow, GaussianWindow, window_spectrum, window_weights


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitml", description="Gait-signal windowing, features and classification sweeps"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subjects-per-group", type=int, default=20)
    p.add_argument("--duration", type=float, default=10.0, help="walk duration in seconds")
    p.add_argument("--rate", type=float, default=180.0, help="sample rate in Hz")
    p.add_argument("--accel-noise", type=float, default=0.3)
    p.add_argument("--gyro-noise", type=float, default=0.05)

    p = sub.add_parser("extract", help="extract a labeled feature matrix")
    _data_args(p)
    p.add_argument("--out", required=True, help="output CSV file")

    p = sub.add_parser("sweep-window", help="accuracy vs window parameter")
    _data_args(p, param=False)
    _cv_args(p)
    p.add_argument("--values", type=float, nargs="+", help="window parameters in seconds")
    p.add_argument("--classifiers", nargs="+", default=list(sweeps.CLASSIFIER_ORDER))
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sweep-pca", help="accuracy vs number of principal components")
    _data_args(p)
    _cv_args(p)
    p.add_argument("--components", type=int, nargs="+", default=list(sweeps.DEFAULT_PCA_COMPONENTS))
    p.add_argument("--classifiers", nargs="+", default=["knn"])
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("evaluate", help="cross-validate one classifier at one window")
    _data_args(p)
    _cv_args(p)
    p.add_argument("--classifier", required=True, choices=sweeps.CLASSIFIER_ORDER)
    p.add_argument("--pca-components", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("spectra", help="window frequency-response report")
    p.add_argument("--window", required=True, choices=["box", "gaussian"])
    p.add_argument("--width", type=float, help="box width in seconds")
    p.add_argument("--sigma", type=float, help="gaussian sigma in seconds")
    p.add_argument("--rate", type=float, default=180.0)
    p.add_argument("--n-fft", type=int, default=None)
    p.add_argument("--json", action="store_true", help="write only the JSON summary")
    p.add_argument("--csv", action="store_true", help="write only the CSV spectrum")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _data_args(p: argparse.ArgumentParser, param: bool = True) -> None:
    p.add_argument("--manifest", required=True, help="cohort manifest JSON")
    p.add_argument("--task", required=True, choices=["bmi", "age"])
    p.add_argument("--window", required=True, choices=["box", "gaussian"])
    if param:
        p.add_argument("--param", type=float, required=True, help="width/sigma in seconds")
    p.add_argument("--truncate-head", type=float, default=2.0)
    p.add_argument("--truncate-tail", type=float, default=2.0)


def _cv_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--mode", choices=["segment", "subject"], default="segment")
    p.add_argument("--seed", type=int, default=0)


def _load_cohort(args) -> sweeps.Cohort:
    manifest_path = Path(args.manifest)
    manifest = ingest.load_manifest(manifest_path.read_text())
    return ingest.load_cohort(manifest, manifest_path.parent)


def _truncation(args) -> ingest.TruncationSpec:
    return ingest.TruncationSpec(head_s=args.truncate_head, tail_s=args.truncate_tail)


def _cmd_synth(args) -> int:
    spec = synth.CohortSpec(
        subjects_per_age_group=args.subjects_per_group,
        walk_duration_s=args.duration,
        sample_rate_hz=args.rate,
        accel_noise_sd=args.accel_noise,
        gyro_noise_sd=args.gyro_noise,
        seed=args.seed,
    )
    manifest, recordings = synth.generate_cohort(spec)
    out = Path(args.out)
    (out / "recordings").mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(ingest.format_manifest_json(manifest))
    for entry in manifest.entries:
        (out / entry.path).write_text(ingest.format_recording_csv(recordings[entry.subject.id]))
    print(f"wrote {len(manifest.entries)} subjects to {out}")
    return 0


def _cmd_extract(args) -> int:
    cohort = _load_cohort(args)
    matrix = sweeps.cohort_matrix(
        cohort, sweeps.make_window(args.window, args.param), args.task, _truncation(args)
    )
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(ingest.save_feature_matrix(matrix))
    print(f"wrote {matrix.n_rows} rows to {args.out}")
    return 0


def _cmd_sweep_window(args) -> int:
    cohort = _load_cohort(args)
    grid = sweeps.SweepGrid(
        task=args.task,
        window_kind=args.window,
        values=tuple(args.values) if args.values else (),
        classifiers=tuple(args.classifiers),
    )
    report = sweeps.run_window_sweep(
        cohort,
        grid,
        k=args.folds,
        mode=args.mode,
        seed=args.seed,
        truncation=_truncation(args),
        workers=args.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"sweep_{args.task}_{args.window}"
    (out / f"{stem}.csv").write_text(report.to_csv())
    (out / f"{stem}_table.csv").write_text(to_table_csv(report, grid))
    print(f"wrote {stem}.csv ({len(report.rows)} rows)")
    return 0


def to_table_csv(report: sweeps.SweepReport, grid: sweeps.SweepGrid) -> str:
    """Wide pivot (one row per window value, one column per classifier)."""
    lines = ["param_s," + ",".join(grid.classifiers)]
    for value in grid.values:
        cells = [str(value)]
        for name in grid.classifiers:
            row = report.row(value, name)
            cells.append(f"{100.0 * row.accuracy:.2f}" if row.accuracy is not None else "NA")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cmd_sweep_pca(args) -> int:
    cohort = _load_cohort(args)
    result = sweeps.run_pca_sweep(
        cohort,
        sweeps.make_window(args.window, args.param),
        args.task,
        components=tuple(args.components),
        classifiers=tuple(args.classifiers),
        k=args.folds,
        mode=args.mode,
        seed=args.seed,
        truncation=_truncation(args),
        workers=args.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"pca_{args.task}_{args.window}_{args.param}"
    (out / f"{stem}.csv").write_text(result.to_csv())
    (out / f"{stem}_plateaus.json").write_text(json.dumps(result.plateaus, sort_keys=True) + "\n")
    print(f"wrote {stem}.csv")
    return 0


def _cmd_evaluate(args) -> int:
    cohort = _load_cohort(args)
    report = sweeps.evaluate_cell(
        cohort,
        sweeps.make_window(args.window, args.param),
        args.task,
        sweeps.DEFAULT_SPECS[args.classifier],
        k=args.folds,
        mode=args.mode,
        seed=args.seed,
        truncation=_truncation(args),
        pca_components=args.pca_components,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"eval_{args.task}_{args.window}_{args.param}_{args.classifier}"
    (out / f"{stem}.json").write_text(report.to_json() + "\n")
    (out / f"{stem}_confusion.csv").write_text(report.confusion_csv())
    print(f"accuracy {100.0 * report.accuracy:.2f}% -> {stem}.json")
    return 0


def _cmd_spectra(args) -> int:
    if args.window == "box":
        if args.width is None:
            raise ValueError("--width is required for the box window")
        spec = BoxWindow(width_s=args.width)
        param = args.width
    else:
        if args.sigma is None:
            raise ValueError("--sigma is required for the gaussian window")
        spec = GaussianWindow(sigma_s=args.sigma)
        param = args.sigma
    report = window_spectrum(window_weights(spec, args.rate), n_fft=args.n_fft)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"spectrum_{args.window}_{param}"
    want_json = args.json or not args.csv
    want_csv = args.csv or not args.json
    if want_json:
        (out / f"{stem}.json").write_text(report.summary_json() + "\n")
    if want_csv:
        (out / f"{stem}.csv").write_text(report.to_csv())
    print(f"main lobe {report.main_lobe_width_cps:.6f} cycles/sample -> {stem}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "sweep-window": _cmd_sweep_window,
    "sweep-pca": _cmd_sweep_pca,
    "evaluate": _cmd_evaluate,
    "spectra": _cmd_spectra,
}


def cli(argv: list[str] | None = None) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
