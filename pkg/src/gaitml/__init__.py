"""gaitml: smartphone gait-signal windowing, statistical features and
from-scratch classifiers for BMI and age group prediction."""

__version__ = "0.1.0"

from .domain import (
    AgeCategory,
    BmiCategory,
    SensorRecording,
    SubjectProfile,
    categorize_age,
    categorize_bmi,
    compute_bmi,
)
from .windowing import BoxWindow, GaussianWindow, Segment, window_spectrum, window_weights
from .features import FeatureMatrix, FeatureVector14, segment_features

__all__ = [
    "__version__",
    "AgeCategory",
    "BmiCategory",
    "SensorRecording",
    "SubjectProfile",
    "categorize_age",
    "categorize_bmi",
    "compute_bmi",
    "BoxWindow",
    "GaussianWindow",
    "Segment",
    "window_spectrum",
    "window_weights",
    "FeatureMatrix",
    "FeatureVector14",
    "segment_features",
]
