"""Kalman-accelerated point tracking.

Wraps any per-frame point tracker: expensive measurements at sparse
keyframes, constant-velocity Kalman predictions in between.
"""

from .kalman import FilterState, KalmanParams, init_filter, predict, update
from .predictors import PredictorKind
from .scheduler import ScheduleConfig, inference_count, plan_schedule, run_session
from .synthgen import Dataset, TrajectoryKind, TrajectorySpec, generate
from .trackers import Measurement, OracleConfig, OracleTracker

__all__ = [
    "Dataset",
    "FilterState",
    "KalmanParams",
    "Measurement",
    "OracleConfig",
    "OracleTracker",
    "PredictorKind",
    "ScheduleConfig",
    "TrajectoryKind",
    "TrajectorySpec",
    "generate",
    "inference_count",
    "init_filter",
    "plan_schedule",
    "predict",
    "run_session",
    "update",
]

__version__ = "0.1.0"
