"""Synthetic gait cohorts with class-dependent harmonic structure.

Recordings are sums of a few harmonics of a per-subject step frequency plus
channel bias (gravity on the z accelerometer) and Gaussian white noise. The
construction is not biomechanics; it only guarantees that age and body
composition leave learnable, monotone traces in the signal:

  * step frequency falls with age (dominant term) and with BMI
  * harmonic amplitude falls with BMI
  * the 2nd/3rd-harmonic mix grows with age

Per-subject jitter (seeded from the subject id) keeps individuals distinct.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .domain import AgeCategory, BmiCategory, SensorRecording, SubjectProfile, categorize_bmi
from .ingest import CohortManifest, ManifestEntry

GRAVITY_MS2 = 9.81
#: gravity rides on the accelerometer z channel
GRAVITY_CHANNEL = 2

_AGE_RANGES = {
    AgeCategory.YOUNG: (10, 20),
    AgeCategory.YOUNG_ADULT: (21, 30),
    AgeCategory.ADULT: (31, 40),
    AgeCategory.AGED: (41, 60),
}
# sampling intervals per BMI class, cycled over subjects so no class is empty
_BMI_RANGES = ((12.5, 14.8), (15.2, 18.3), (18.7, 24.8), (25.2, 29.8), (30.2, 38.0))

_CHANNEL_GAINS = np.array([1.0, 0.8, 0.9, 0.55, 0.65, 0.45])
_HARMONIC_PHASES = np.array([0.0, math.pi / 3, 2 * math.pi / 3])

# interval bounds used to place a value inside its category (open ends clamped)
_BMI_CAT_BOUNDS = {
    BmiCategory.SEVERELY_UNDERWEIGHT: (12.0, 15.0),
    BmiCategory.UNDERWEIGHT: (15.0, 18.5),
    BmiCategory.NORMAL: (18.5, 25.0),
    BmiCategory.OVERWEIGHT: (25.0, 30.0),
    BmiCategory.SEVERELY_OVERWEIGHT: (30.0, 40.0),
}


def _stepped_score(category: float, lo: float, hi: float, value: float) -> float:
    """category + within-category position scaled to 0.55, so consecutive
    categories are separated by a 0.45 step while the score stays strictly
    increasing in `value`."""
    position = min(max((value - lo) / (hi - lo), 0.0), 1.0)
    return category + 0.55 * position


@dataclass(frozen=True)
class CohortSpec:
    subjects_per_age_group: int = 20
    walk_duration_s: float = 10.0
    sample_rate_hz: float = 180.0
    accel_noise_sd: float = 0.3
    gyro_noise_sd: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.subjects_per_age_group < 1:
            raise ValueError("need at least one subject per age group")
        if self.walk_duration_s * self.sample_rate_hz < 2:
            raise ValueError("recordings need at least 2 samples")
        if self.accel_noise_sd < 0 or self.gyro_noise_sd < 0:
            raise ValueError("noise SDs must be >= 0")


@dataclass(frozen=True)
class GaitParams:
    step_frequency_hz: float
    channel_amplitudes: np.ndarray  # (6,)
    harmonic_weights: np.ndarray  # (3,)
    phase_offsets: np.ndarray  # (6,)
    accel_noise_sd: float
    gyro_noise_sd: float

    def __post_init__(self):
        if not (1.4 <= self.step_frequency_hz <= 2.5):
            raise ValueError(f"step frequency {self.step_frequency_hz} outside [1.4, 2.5] Hz")
        if not np.all(np.asarray(self.channel_amplitudes) > 0):
            raise ValueError("channel amplitudes must be > 0")


def _subject_rng(seed: int, subject_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(subject_id.encode())])


def derive_gait_params(
    profile: SubjectProfile,
    seed: int,
    accel_noise_sd: float = 0.3,
    gyro_noise_sd: float = 0.05,
) -> GaitParams:
    """Deterministic profile -> gait parameter map with bounded seeded jitter.

    The jitter stream depends only on (seed, subject id), so comparisons
    across ages or BMIs at a fixed id are strictly monotone.
    """
    rng = _subject_rng(seed, profile.id)
    jitter = np.tanh(rng.normal(size=12))  # bounded in (-1, 1)

    # strictly monotone scores with a step at every category boundary, so the
    # groups stay separable while monotonicity holds within and across groups
    age_score = _stepped_score(
        float(profile.age_category), *_AGE_RANGES[profile.age_category], profile.age_years
    )
    bmi = profile.bmi
    bmi_cat = categorize_bmi(bmi)
    bmi_score = _stepped_score(float(bmi_cat), *_BMI_CAT_BOUNDS[bmi_cat], bmi)

    bmi_pull = 1.0 / (1.0 + math.exp((bmi - 25.0) / 6.0))  # strictly falls with BMI
    step_freq = 2.37 - 0.24 * age_score + 0.05 * bmi_pull + 0.02 * jitter[0]

    base_amplitude = 4.9 - 0.74 * bmi_score + 0.05 * jitter[1]
    amplitudes = base_amplitude * _CHANNEL_GAINS * (1.0 + 0.06 * jitter[2:8])

    harmonics = np.array(
        [
            1.0,
            0.18 + 0.21 * age_score + 0.02 * jitter[8],
            0.08 + 0.14 * age_score + 0.02 * jitter[9],
        ]
    )
    phases = rng.uniform(0.0, 2.0 * math.pi, size=6)
    return GaitParams(
        step_frequency_hz=step_freq,
        channel_amplitudes=amplitudes,
        harmonic_weights=harmonics,
        phase_offsets=phases,
        accel_noise_sd=accel_noise_sd,
        gyro_noise_sd=gyro_noise_sd,
    )


def generate_recording(
    params: GaitParams,
    duration_s: float,
    rate_hz: float,
    seed: int,
    subject_id: str = "",
) -> SensorRecording:
    """Realize the harmonic signal model with additive Gaussian white noise."""
    n = int(round(duration_s * rate_hz))
    if n < 2:
        raise ValueError(f"duration {duration_s}s at {rate_hz}Hz yields {n} samples")
    t = np.arange(n) / rate_hz
    channels = np.empty((6, n))
    for ch in range(6):
        signal = np.zeros(n)
        for h, (weight, psi) in enumerate(zip(params.harmonic_weights, _HARMONIC_PHASES), start=1):
            signal += weight * np.sin(
                2.0 * math.pi * h * params.step_frequency_hz * t
                + h * params.phase_offsets[ch]
                + psi
            )
        channels[ch] = params.channel_amplitudes[ch] * signal
    channels[GRAVITY_CHANNEL] += GRAVITY_MS2
    rng = np.random.default_rng(seed)
    noise_sd = np.array([params.accel_noise_sd] * 3 + [params.gyro_noise_sd] * 3)
    channels += noise_sd[:, None] * rng.standard_normal(channels.shape)
    return SensorRecording(subject_id=subject_id, channels=channels, sample_rate_hz=rate_hz)


def generate_cohort(spec: CohortSpec) -> tuple[CohortManifest, dict[str, SensorRecording]]:
    """Four age groups x subjects_per_age_group, BMI classes cycled across
    subjects; bit-identical for a fixed seed."""
    master = np.random.default_rng(spec.seed)
    entries = []
    recordings: dict[str, SensorRecording] = {}
    index = 0
    for group in AgeCategory:
        lo, hi = _AGE_RANGES[group]
        for _ in range(spec.subjects_per_age_group):
            subject_id = f"s{index:03d}"
            age = int(master.integers(lo, hi + 1))
            bmi_lo, bmi_hi = _BMI_RANGES[index % len(_BMI_RANGES)]
            bmi = float(master.uniform(bmi_lo, bmi_hi))
            height = float(master.uniform(1.55, 1.90))
            profile = SubjectProfile(
                id=subject_id,
                mass_kg=bmi * height * height,
                height_m=height,
                age_years=age,
            )
            params = derive_gait_params(
                profile, spec.seed, spec.accel_noise_sd, spec.gyro_noise_sd
            )
            recordings[subject_id] = generate_recording(
                params,
                spec.walk_duration_s,
                spec.sample_rate_hz,
                seed=spec.seed + index,
                subject_id=subject_id,
            )
            entries.append(ManifestEntry(subject=profile, path=f"recordings/{subject_id}.csv"))
            index += 1
    manifest = CohortManifest(sample_rate_hz=spec.sample_rate_hz, entries=tuple(entries))
    return manifest, recordings
