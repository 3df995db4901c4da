"""Box/Gaussian sliding-window segmentation and window frequency-response reports.

Segmentation applies the window multiplicatively to the raw slice and advances
by half the window length (50% overlap). Trailing samples that do not fill a
complete window are dropped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

OVERLAP_FRACTION = 0.5
MIN_WINDOW_SAMPLES = 4  # below this, kurtosis/autocorrelation are meaningless


def round_half_up(x: float) -> int:
    """Deterministic seconds->samples rounding (0.5 always rounds up)."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class BoxWindow:
    """Rectangular window of `width_s` seconds; weights are all ones."""

    width_s: float

    def __post_init__(self):
        if not (self.width_s > 0):
            raise ValueError(f"box width must be > 0 s, got {self.width_s}")

    @property
    def param_s(self) -> float:
        return self.width_s


@dataclass(frozen=True)
class GaussianWindow:
    """Gaussian window of standard deviation `sigma_s` seconds.

    The infinite Gaussian is truncated to `support_sigmas` total standard
    deviations (default 6, i.e. +-3 sigma, keeping >99.7% of the mass), which
    fixes a concrete window length and hop.
    """

    sigma_s: float
    support_sigmas: float = 6.0

    def __post_init__(self):
        if not (self.sigma_s > 0):
            raise ValueError(f"gaussian sigma must be > 0 s, got {self.sigma_s}")
        if not (self.support_sigmas > 0):
            raise ValueError(f"support must be > 0 sigma, got {self.support_sigmas}")

    @property
    def param_s(self) -> float:
        return self.sigma_s


WindowSpec = BoxWindow | GaussianWindow


@dataclass(frozen=True)
class Segment:
    """One windowed slice of one channel (weights already applied)."""

    channel: str
    start_index: int
    values: np.ndarray


def window_weights(spec: WindowSpec, rate_hz: float) -> np.ndarray:
    """Sample the window function at `rate_hz`.

    Box -> round(width*rate) ones. Gaussian -> round(support*sigma*rate)
    samples (forced odd so the peak sits on a sample), values
    exp(-(n-c)^2 / (2*sigma_n^2)) / (sigma_n*sqrt(2*pi)) with sigma_n in
    samples and c the center index. The 1/(sigma*sqrt(2*pi)) prefactor is a
    uniform per-sigma scale; standardization removes it downstream.
    """
    if not (rate_hz > 0):
        raise ValueError(f"sample rate must be > 0, got {rate_hz}")
    if isinstance(spec, BoxWindow):
        length = round_half_up(spec.width_s * rate_hz)
        _check_length(length, spec)
        return np.ones(length)
    length = round_half_up(spec.support_sigmas * spec.sigma_s * rate_hz)
    if length % 2 == 0:
        length += 1
    _check_length(length, spec)
    sigma_n = spec.sigma_s * rate_hz
    center = (length - 1) / 2.0
    n = np.arange(length, dtype=float)
    return np.exp(-((n - center) ** 2) / (2.0 * sigma_n**2)) / (sigma_n * math.sqrt(2.0 * math.pi))


def _check_length(length: int, spec: WindowSpec) -> None:
    if length < MIN_WINDOW_SAMPLES:
        raise ValueError(
            f"window {spec} yields {length} samples; need at least {MIN_WINDOW_SAMPLES}"
        )


def hop_for(length: int) -> int:
    """Hop in samples for 50% overlap: floor(L/2)."""
    return length // 2


def segment_count(n_samples: int, length: int) -> int:
    """Number of full-window placements: floor((N-L)/hop) + 1 for N >= L."""
    if n_samples < length:
        return 0
    return (n_samples - length) // hop_for(length) + 1


def segment_signal(
    signal: np.ndarray,
    spec: WindowSpec,
    rate_hz: float,
    channel: str = "",
) -> list[Segment]:
    """Slice `signal` into weighted, 50%-overlapping segments."""
    signal = np.asarray(signal, dtype=float)
    weights = window_weights(spec, rate_hz)
    length = len(weights)
    if len(signal) < length:
        raise ValueError(
            f"signal of {len(signal)} samples is shorter than one {length}-sample window"
        )
    hop = hop_for(length)
    segments = []
    for start in range(0, len(signal) - length + 1, hop):
        segments.append(Segment(channel, start, signal[start : start + length] * weights))
    return segments


@dataclass(frozen=True)
class SpectrumReport:
    """Zero-padded DFT magnitude of a window, normalized to 0 dB at the peak.

    Frequencies are in cycles/sample over [0, 0.5]; `main_lobe_width_cps` is
    the two-sided -3 dB width, `first_sidelobe_db` the level of the first
    secondary maximum (None when the spectrum decays without sidelobes).
    """

    freqs_cps: np.ndarray
    magnitude_db: np.ndarray
    main_lobe_width_cps: float
    first_sidelobe_db: float | None

    def to_csv(self) -> str:
        lines = ["freq,mag_db"]
        for f, m in zip(self.freqs_cps, self.magnitude_db):
            lines.append(f"{f!r},{m!r}")
        return "\n".join(lines) + "\n"

    def summary_json(self) -> str:
        return json.dumps(
            {
                "main_lobe_width": self.main_lobe_width_cps,
                "first_sidelobe_db": self.first_sidelobe_db,
            },
            sort_keys=True,
        )


DB_FLOOR = -400.0  # stands in for -inf at exact spectral nulls


def window_spectrum(weights: np.ndarray, n_fft: int | None = None) -> SpectrumReport:
    """Zero-padded DFT magnitude report for a window's weight sequence."""
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0 or not np.any(weights):
        raise ValueError("window weights are all zero")
    if n_fft is None:
        n_fft = 1 << max(6, (8 * len(weights) - 1).bit_length())
    elif n_fft < 8 * len(weights):
        raise ValueError(f"n_fft={n_fft} too small; need >= 8*length = {8 * len(weights)}")
    mag = np.abs(np.fft.rfft(weights, n_fft))
    peak = mag.max()
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag / peak)
    db = np.maximum(db, DB_FLOOR)
    freqs = np.fft.rfftfreq(n_fft)
    return SpectrumReport(
        freqs_cps=freqs,
        magnitude_db=db,
        main_lobe_width_cps=_main_lobe_width(freqs, db),
        first_sidelobe_db=_first_sidelobe(db),
    )


def _main_lobe_width(freqs: np.ndarray, db: np.ndarray) -> float:
    below = np.nonzero(db < -3.0)[0]
    if below.size == 0:
        return 1.0  # never drops 3 dB: the main lobe spans the whole band
    i = below[0]
    if i == 0:
        return 0.0
    # linear interpolation of the -3 dB crossing between bins i-1 and i
    frac = (-3.0 - db[i - 1]) / (db[i] - db[i - 1])
    f_cross = freqs[i - 1] + frac * (freqs[i] - freqs[i - 1])
    return 2.0 * f_cross


def _first_sidelobe(db: np.ndarray) -> float | None:
    # walk down the main lobe to its first minimum, then up to the next peak
    i = 1
    n = len(db)
    while i < n and db[i] <= db[i - 1]:
        i += 1
    if i >= n:
        return None
    j = i
    while j < n and db[j] >= db[j - 1]:
        j += 1
    return float(db[j - 1])
