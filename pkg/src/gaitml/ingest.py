"""Sensor-log parsing, truncation, cohort manifests and feature-matrix files.

File formats:
  * recording CSV: optional single header line, then rows
    "t_ms,ax,ay,az,gx,gy,gz" (7 numeric fields; t_ms is ignored, uniform
    sampling at the declared rate is assumed)
  * manifest JSON: {"sample_rate_hz": .., "subjects": [{"id", "mass_kg",
    "height_m", "age_years", "path"}, ..]}
  * feature CSV: header of the 84 "channel.feature" names plus "label" and
    "subject_id"; float cells use repr so round-trips are exact
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import AgeCategory, BmiCategory, CHANNEL_NAMES, SensorRecording, SubjectProfile
from .features import COLUMN_NAMES, FeatureMatrix
from .windowing import round_half_up

RECORDING_HEADER = ("t_ms",) + CHANNEL_NAMES
_LABELS_BY_NAME = {member.name: member for enum in (BmiCategory, AgeCategory) for member in enum}


class ParseError(ValueError):
    """Malformed recording CSV; `line` is the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FormatError(ValueError):
    """Feature-matrix file does not match the declared schema."""


@dataclass(frozen=True)
class TruncationSpec:
    """Seconds removed from the head/tail of a recording (pocket handling)."""

    head_s: float = 2.0
    tail_s: float = 2.0

    def __post_init__(self):
        if self.head_s < 0 or self.tail_s < 0:
            raise ValueError(f"truncation must be >= 0 s, got {self}")


@dataclass(frozen=True)
class ManifestEntry:
    subject: SubjectProfile
    path: str


@dataclass(frozen=True)
class CohortManifest:
    sample_rate_hz: float
    entries: tuple[ManifestEntry, ...]


def parse_recording(text: str, sample_rate_hz: float, subject_id: str = "") -> SensorRecording:
    """Parse a recording CSV into 6 equal-length channels (t_ms discarded)."""
    rows = []
    first_data_line = True
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if first_data_line and lineno == 1 and not _is_numeric_row(fields):
            continue  # the optional header
        first_data_line = False
        if len(fields) != 7:
            raise ParseError(lineno, f"expected 7 comma-separated fields, got {len(fields)}")
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise ParseError(lineno, f"non-numeric value {bad!r}") from None
    if len(rows) < 2:
        raise ParseError(len(text.split("\n")), f"fewer than 2 samples (got {len(rows)})")
    data = np.array(rows, dtype=float)
    return SensorRecording(
        subject_id=subject_id, channels=data[:, 1:].T, sample_rate_hz=sample_rate_hz
    )


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def _is_numeric_row(fields: list[str]) -> bool:
    return all(_is_float(f) for f in fields)


def format_recording_csv(rec: SensorRecording) -> str:
    """Inverse of parse_recording; t_ms is reconstructed from the sample rate."""
    lines = [",".join(RECORDING_HEADER)]
    step_ms = 1000.0 / rec.sample_rate_hz
    for i in range(len(rec)):
        cells = [repr(round(i * step_ms, 6))] + [repr(v) for v in rec.channels[:, i]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def truncate_recording(rec: SensorRecording, spec: TruncationSpec) -> SensorRecording:
    """Drop round(head*rate) leading and round(tail*rate) trailing samples."""
    head = round_half_up(spec.head_s * rec.sample_rate_hz)
    tail = round_half_up(spec.tail_s * rec.sample_rate_hz)
    if head + tail >= len(rec):
        raise ValueError(
            f"truncation of {head}+{tail} samples exceeds recording length {len(rec)}"
        )
    return SensorRecording(
        subject_id=rec.subject_id,
        channels=rec.channels[:, head : len(rec) - tail],
        sample_rate_hz=rec.sample_rate_hz,
    )


def load_manifest(text: str) -> CohortManifest:
    """Parse and fully validate a cohort manifest; reports all bad entries at once."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "subjects" not in doc or "sample_rate_hz" not in doc:
        raise ValueError("manifest must be an object with 'sample_rate_hz' and 'subjects'")
    rate = doc["sample_rate_hz"]
    if not isinstance(rate, (int, float)) or rate <= 0:
        raise ValueError(f"sample_rate_hz must be a positive number, got {rate!r}")

    entries = []
    problems = []
    seen_ids: set[str] = set()
    seen_paths: set[str] = set()
    for i, item in enumerate(doc["subjects"]):
        ident = item.get("id", f"<entry {i}>") if isinstance(item, dict) else f"<entry {i}>"
        try:
            if not isinstance(item, dict):
                raise ValueError("entry is not an object")
            subject = SubjectProfile(
                id=str(item["id"]),
                mass_kg=float(item["mass_kg"]),
                height_m=float(item["height_m"]),
                age_years=int(item["age_years"]),
            )
            path = str(item["path"])
            if subject.id in seen_ids:
                raise ValueError(f"duplicate subject id {subject.id!r}")
            if path in seen_paths:
                raise ValueError(f"duplicate recording path {path!r}")
            seen_ids.add(subject.id)
            seen_paths.add(path)
            entries.append(ManifestEntry(subject=subject, path=path))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{ident}: {exc}")
    if problems:
        raise ValueError("invalid manifest entries: " + "; ".join(problems))
    return CohortManifest(sample_rate_hz=float(rate), entries=tuple(entries))


def format_manifest_json(manifest: CohortManifest) -> str:
    doc = {
        "sample_rate_hz": manifest.sample_rate_hz,
        "subjects": [
            {
                "id": e.subject.id,
                "mass_kg": e.subject.mass_kg,
                "height_m": e.subject.height_m,
                "age_years": e.subject.age_years,
                "path": e.path,
            }
            for e in manifest.entries
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_cohort(
    manifest: CohortManifest, base_dir: str | Path
) -> list[tuple[SubjectProfile, SensorRecording]]:
    """Read every recording named by the manifest (paths relative to base_dir)."""
    base = Path(base_dir)
    cohort = []
    for entry in manifest.entries:
        text = (base / entry.path).read_text()
        rec = parse_recording(text, manifest.sample_rate_hz, subject_id=entry.subject.id)
        cohort.append((entry.subject, rec))
    return cohort


def save_feature_matrix(matrix: FeatureMatrix) -> str:
    """Serialize to the fixed 86-column CSV (84 features, label, subject_id)."""
    if matrix.n_features != len(COLUMN_NAMES):
        raise FormatError(f"expected {len(COLUMN_NAMES)} feature columns, got {matrix.n_features}")
    lines = [",".join(COLUMN_NAMES + ("label", "subject_id"))]
    for i in range(matrix.n_rows):
        sid = matrix.subject_ids[i]
        if "," in sid or "\n" in sid:
            raise FormatError(f"subject id {sid!r} contains a delimiter")
        cells = [repr(v) for v in matrix.features[i]]
        cells.append(matrix.labels[i].name)
        cells.append(sid)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_feature_matrix(text: str) -> FeatureMatrix:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise FormatError("empty feature-matrix file")
    expected_header = ",".join(COLUMN_NAMES + ("label", "subject_id"))
    if lines[0].strip() != expected_header:
        got = len(lines[0].split(","))
        raise FormatError(
            f"header mismatch: expected the {len(COLUMN_NAMES)} feature columns plus "
            f"label and subject_id, got {got} columns"
        )
    n_cols = len(COLUMN_NAMES) + 2
    features, labels, sids = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n_cols:
            raise FormatError(f"line {lineno}: expected {n_cols} columns, got {len(cells)}")
        try:
            features.append([float(c) for c in cells[: len(COLUMN_NAMES)]])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        name = cells[len(COLUMN_NAMES)]
        if name not in _LABELS_BY_NAME:
            raise FormatError(f"line {lineno}: unknown label {name!r}")
        labels.append(_LABELS_BY_NAME[name])
        sids.append(cells[-1])
    arr = np.array(features, dtype=float) if features else np.empty((0, len(COLUMN_NAMES)))
    try:
        return FeatureMatrix(features=arr, labels=labels, subject_ids=sids)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
