"""Core domain types: subjects, BMI/age categories and the six-channel recording."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Fixed channel order used everywhere downstream (feature columns depend on it).
CHANNEL_NAMES = ("ax", "ay", "az", "gx", "gy", "gz")

AGE_MIN = 10
AGE_MAX = 60


class BmiCategory(enum.IntEnum):
    """WHO obesity classes, ordered by ascending BMI interval."""

    SEVERELY_UNDERWEIGHT = 0
    UNDERWEIGHT = 1
    NORMAL = 2
    OVERWEIGHT = 3
    SEVERELY_OVERWEIGHT = 4


class AgeCategory(enum.IntEnum):
    """Age groups, ordered by ascending age interval."""

    YOUNG = 0
    YOUNG_ADULT = 1
    ADULT = 2
    AGED = 3


def compute_bmi(mass_kg: float, height_m: float) -> float:
    """Quetelet index: mass (kg) divided by squared height (m)."""
    if not (mass_kg > 0 and math.isfinite(mass_kg)):
        raise ValueError(f"mass must be positive and finite, got {mass_kg}")
    if not (height_m > 0 and math.isfinite(height_m)):
        raise ValueError(f"height must be positive and finite, got {height_m}")
    return mass_kg / (height_m * height_m)


def categorize_bmi(bmi: float) -> BmiCategory:
    """Map a BMI value onto its WHO class.

    Interval endpoints are shared in the WHO table; here every interval is
    left-closed/right-open (open bottom below 15, closed top above 30), so each
    finite positive BMI lands in exactly one class.
    """
    if not (bmi > 0 and math.isfinite(bmi)):
        raise ValueError(f"BMI must be positive and finite, got {bmi}")
    if bmi < 15.0:
        return BmiCategory.SEVERELY_UNDERWEIGHT
    if bmi < 18.5:
        return BmiCategory.UNDERWEIGHT
    if bmi < 25.0:
        return BmiCategory.NORMAL
    if bmi < 30.0:
        return BmiCategory.OVERWEIGHT
    return BmiCategory.SEVERELY_OVERWEIGHT


def categorize_age(age_years: int) -> AgeCategory:
    """Map whole years onto the four labeled age groups (10..60 only)."""
    if age_years != int(age_years):
        raise ValueError(f"age must be a whole number of years, got {age_years}")
    age = int(age_years)
    if age < AGE_MIN or age > AGE_MAX:
        raise ValueError(f"age {age} outside the labeled range [{AGE_MIN}, {AGE_MAX}]")
    if age <= 20:
        return AgeCategory.YOUNG
    if age <= 30:
        return AgeCategory.YOUNG_ADULT
    if age <= 40:
        return AgeCategory.ADULT
    return AgeCategory.AGED


@dataclass(frozen=True)
class SubjectProfile:
    """One subject's anthropometrics; the source of both task labels."""

    id: str
    mass_kg: float
    height_m: float
    age_years: int

    def __post_init__(self):
        if not (self.mass_kg > 0 and math.isfinite(self.mass_kg)):
            raise ValueError(f"subject {self.id!r}: mass must be > 0, got {self.mass_kg}")
        if not (self.height_m > 0 and math.isfinite(self.height_m)):
            raise ValueError(f"subject {self.id!r}: height must be > 0, got {self.height_m}")
        if int(self.age_years) != self.age_years or not (AGE_MIN <= self.age_years <= AGE_MAX):
            raise ValueError(
                f"subject {self.id!r}: age must be an integer in [{AGE_MIN}, {AGE_MAX}],"
                f" got {self.age_years}"
            )

    @property
    def bmi(self) -> float:
        return compute_bmi(self.mass_kg, self.height_m)

    @property
    def bmi_category(self) -> BmiCategory:
        return categorize_bmi(self.bmi)

    @property
    def age_category(self) -> AgeCategory:
        return categorize_age(self.age_years)


@dataclass(frozen=True)
class SensorRecording:
    """Six aligned raw time series (accel x/y/z in m/s^2, gyro x/y/z in rad/s).

    `channels` is a (6, n) float array in CHANNEL_NAMES order, uniformly
    sampled at `sample_rate_hz`. Arrays are frozen after construction so
    recordings can be shared freely.
    """

    subject_id: str
    channels: np.ndarray
    sample_rate_hz: float = 180.0

    def __post_init__(self):
        arr = np.asarray(self.channels, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != len(CHANNEL_NAMES):
            raise ValueError(f"channels must be (6, n), got shape {arr.shape}")
        if arr.shape[1] < 2:
            raise ValueError(f"recording needs at least 2 samples, got {arr.shape[1]}")
        if not (self.sample_rate_hz > 0):
            raise ValueError(f"sample rate must be > 0, got {self.sample_rate_hz}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "channels", arr)

    def __len__(self) -> int:
        return self.channels.shape[1]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def channel(self, name: str) -> np.ndarray:
        return self.channels[CHANNEL_NAMES.index(name)]
