"""Per-segment statistical features (14 per channel, 84 per row) and z-scoring.

Feature order is frozen: channel-major over (ax, ay, az, gx, gy, gz), then the
14 statistics in FEATURE_NAMES order. Persistence and classifiers rely on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import CHANNEL_NAMES, SensorRecording
from .windowing import WindowSpec, segment_signal

FEATURE_NAMES = (
    "mean",
    "std_dev",
    "variance",
    "min",
    "max",
    "jitter",
    "mean_crossing_rate",
    "autocorr_mean",
    "autocorr_sd",
    "autocov_mean",
    "autocov_sd",
    "skewness",
    "kurtosis",
    "rmse",
)

#: 84 column names, e.g. "ay.kurtosis".
COLUMN_NAMES = tuple(f"{ch}.{feat}" for ch in CHANNEL_NAMES for feat in FEATURE_NAMES)

MIN_SEGMENT_SAMPLES = 4


@dataclass(frozen=True)
class FeatureVector14:
    """The 14 statistics of one segment, in FEATURE_NAMES order.

    `degenerate` marks constant segments, where the spread-normalized moments
    (skewness, kurtosis) are defined as 0.
    """

    mean: float
    std_dev: float
    variance: float
    min: float
    max: float
    jitter: float
    mean_crossing_rate: float
    autocorr_mean: float
    autocorr_sd: float
    autocov_mean: float
    autocov_sd: float
    skewness: float
    kurtosis: float
    rmse: float
    degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=float)


def segment_features(values: np.ndarray) -> FeatureVector14:
    """Compute the 14 statistics of one windowed segment (length >= 4).

    Autocorrelation uses the normalized estimator
    R[K] = sum_{n<=N-K} x[n]x[n+K] / sum_{n<=N-K} x[n]^2 and autocovariance the
    raw centered lag sums; both are reduced over lags K = 1..N-1 to their mean
    and sample standard deviation. Standard deviation, variance, kurtosis and
    RMSE use the population denominator N; skewness carries the
    N/((N-1)(N-2)) small-sample factor.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < MIN_SEGMENT_SAMPLES:
        raise ValueError(f"segment too short: {n} samples, need >= {MIN_SEGMENT_SAMPLES}")

    mu = x.mean()
    centered = x - mu
    var = float(np.mean(centered**2))
    sd = math.sqrt(var)

    jitter = float(np.sum(np.abs(np.diff(x)))) / (n - 1)
    above = x > mu
    mcr = float(np.count_nonzero(above[1:] != above[:-1])) / n

    # lag sums K = 1..N-1 via direct correlation (exact, no FFT round-off)
    acorr_num = np.correlate(x, x, mode="full")[n:]
    sq_prefix = np.cumsum(x * x)
    acorr_den = sq_prefix[n - 2 :: -1]
    r = np.zeros(n - 1)
    np.divide(acorr_num, acorr_den, out=r, where=acorr_den > 0)
    acov = np.correlate(centered, centered, mode="full")[n:]

    if sd > 0:
        z = centered / sd
        skew = n / ((n - 1) * (n - 2)) * float(np.sum(z**3))
        kurt = float(np.sum(z**4)) / n
    else:
        skew = 0.0
        kurt = 0.0

    return FeatureVector14(
        mean=float(mu),
        std_dev=sd,
        variance=var,
        min=float(x.min()),
        max=float(x.max()),
        jitter=jitter,
        mean_crossing_rate=mcr,
        autocorr_mean=float(r.mean()),
        autocorr_sd=float(np.std(r, ddof=1)),
        autocov_mean=float(acov.mean()),
        autocov_sd=float(np.std(acov, ddof=1)),
        skewness=skew,
        kurtosis=kurt,
        rmse=sd,
        degenerate=sd == 0.0,
    )


@dataclass
class FeatureMatrix:
    """Rows of 84 features with one label and subject id per row.

    All labels must come from a single enumeration (one task at a time).
    `degenerate_rows` flags rows containing a constant segment; it is
    in-memory metadata and is not persisted.
    """

    features: np.ndarray
    labels: list
    subject_ids: list[str]
    degenerate_rows: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        n = self.features.shape[0]
        if len(self.labels) != n or len(self.subject_ids) != n:
            raise ValueError("labels/subject_ids length must match row count")
        kinds = {type(lab) for lab in self.labels}
        if len(kinds) > 1:
            raise ValueError(f"labels mix enumerations: {sorted(k.__name__ for k in kinds)}")
        if self.degenerate_rows is None:
            self.degenerate_rows = np.zeros(n, dtype=bool)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def assemble_features(rec: SensorRecording, spec: WindowSpec, label) -> FeatureMatrix:
    """Window all 6 channels at identical start indices and build 84-wide rows."""
    per_channel = [
        segment_signal(rec.channels[i], spec, rec.sample_rate_hz, channel=name)
        for i, name in enumerate(CHANNEL_NAMES)
    ]
    n_seg = len(per_channel[0])
    rows = np.empty((n_seg, len(COLUMN_NAMES)))
    degenerate = np.zeros(n_seg, dtype=bool)
    for s in range(n_seg):
        offset = 0
        for segs in per_channel:
            fv = segment_features(segs[s].values)
            rows[s, offset : offset + len(FEATURE_NAMES)] = fv.as_array()
            degenerate[s] |= fv.degenerate
            offset += len(FEATURE_NAMES)
    return FeatureMatrix(
        features=rows,
        labels=[label] * n_seg,
        subject_ids=[rec.subject_id] * n_seg,
        degenerate_rows=degenerate,
    )


def concat_matrices(parts: list[FeatureMatrix]) -> FeatureMatrix:
    if not parts:
        raise ValueError("no matrices to concatenate")
    return FeatureMatrix(
        features=np.vstack([p.features for p in parts]),
        labels=[lab for p in parts for lab in p.labels],
        subject_ids=[sid for p in parts for sid in p.subject_ids],
        degenerate_rows=np.concatenate([p.degenerate_rows for p in parts]),
    )


@dataclass(frozen=True)
class Standardization:
    """Per-column centering/scaling fitted on training rows only."""

    means: np.ndarray
    scales: np.ndarray


def fit_standardize(X: np.ndarray) -> Standardization:
    """Column means and sample standard deviations; constant columns get scale 1."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("standardization needs a 2-D matrix with at least 2 rows")
    means = X.mean(axis=0)
    scales = X.std(axis=0, ddof=1)
    scales = np.where(scales > 0, scales, 1.0)
    return Standardization(means=means, scales=scales)


def apply_standardize(std: Standardization, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[1] != std.means.shape[0]:
        raise ValueError(f"expected {std.means.shape[0]} columns, got {X.shape[1]}")
    return (X - std.means) / std.scales


def invert_standardize(std: Standardization, X: np.ndarray) -> np.ndarray:
    return np.asarray(X, dtype=float) * std.scales + std.means
