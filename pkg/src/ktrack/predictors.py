"""Intermediate-frame position predictors behind one interface.

The full constant-velocity Kalman filter plus every ablation baseline:
a position-only filter, a frozen-covariance filter (constant gain), a
constant-position filter, raw zero-order hold, and linear interpolation
between surrounding measurements. All are value-semantic like kalman-core.

Linear interpolation needs the *next* measurement, so it only works in a
buffered (lookahead) mode: the scheduler feeds the upcoming keyframe via
feed_lookahead before asking for intermediate frames, trading N frames of
latency for the two-sided blend.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import kalman
from .errors import LookaheadUnavailableError
from .kalman import FilterState, KalmanParams, MeasurementModel, MotionModel
from .trackers import Measurement


class PredictorKind(str, Enum):
    FULL_KALMAN = "full-kalman"
    NO_VELOCITY_KALMAN = "no-velocity-kalman"
    FIXED_COVARIANCE_KALMAN = "fixed-covariance-kalman"
    CONSTANT_POSITION = "constant-position"
    ZERO_ORDER_HOLD = "zero-order-hold"
    LINEAR_INTERPOLATION = "linear-interpolation"


KALMAN_KINDS = frozenset(
    {
        PredictorKind.FULL_KALMAN,
        PredictorKind.NO_VELOCITY_KALMAN,
        PredictorKind.FIXED_COVARIANCE_KALMAN,
        PredictorKind.CONSTANT_POSITION,
    }
)


@dataclass
class PredictorState:
    kind: PredictorKind
    filter: FilterState | None = None
    motion: MotionModel | None = None
    meas: MeasurementModel | None = None
    frozen_cov: np.ndarray | None = None
    # Newest-last ring of measured (frame, x, y), length <= 2.
    last_measurements: tuple[tuple[int, float, float], ...] = ()
    # Buffered upcoming measurement for linear interpolation.
    pending: tuple[int, float, float] | None = None


def _variant_motion(kind: PredictorKind, params: KalmanParams) -> MotionModel:
    dt, sp = params.dt, params.sigma_p
    if kind is PredictorKind.NO_VELOCITY_KALMAN:
        # Identity dynamics; only the position block of the noise survives.
        Q = kalman.process_noise(dt, sp)
        Q[2:, :] = 0.0
        Q[:, 2:] = 0.0
        return MotionModel(F=np.eye(4), Q=Q)
    if kind is PredictorKind.CONSTANT_POSITION:
        q = (sp * dt) ** 2
        return MotionModel(F=np.eye(4), Q=np.diag([q, q, 0.0, 0.0]))
    return kalman.motion_model(params)


def _pin_velocity(state: FilterState) -> FilterState:
    mean = state.mean.copy()
    mean[2] = 0.0
    mean[3] = 0.0
    return replace(state, mean=mean)


def init_predictor(
    kind: PredictorKind, z: Measurement, frame: int, params: KalmanParams
) -> PredictorState:
    ring = ((frame, z.x, z.y),)
    if kind not in KALMAN_KINDS:
        return PredictorState(kind=kind, last_measurements=ring)
    filt = kalman.init_filter(z.x, z.y, params, frame=frame)
    if kind is PredictorKind.NO_VELOCITY_KALMAN:
        filt = _pin_velocity(filt)
    st = PredictorState(
        kind=kind,
        filter=filt,
        motion=_variant_motion(kind, params),
        meas=kalman.measurement_model(params),
        last_measurements=ring,
    )
    if kind is PredictorKind.FIXED_COVARIANCE_KALMAN:
        st.frozen_cov = filt.cov.copy()
    return st


def advance(state: PredictorState, frame: int) -> tuple[PredictorState, tuple[float, float]]:
    """One-step prediction: the variant's position estimate for `frame`."""
    if state.kind in KALMAN_KINDS:
        filt = kalman.predict(state.filter, state.motion)
        if state.kind is PredictorKind.NO_VELOCITY_KALMAN:
            filt = _pin_velocity(filt)
        elif state.kind is PredictorKind.FIXED_COVARIANCE_KALMAN:
            filt = replace(filt, cov=state.frozen_cov.copy())
        new = replace(state, filter=filt)
        return new, filt.position()

    last = state.last_measurements[-1]
    if state.kind is PredictorKind.ZERO_ORDER_HOLD:
        return state, (last[1], last[2])

    # Linear interpolation between the last and the buffered next measurement.
    if state.pending is None:
        raise LookaheadUnavailableError(
            f"no buffered next keyframe for interpolation at frame {frame}"
        )
    f0, x0, y0 = last
    f1, x1, y1 = state.pending
    if f1 == f0:
        return state, (x1, y1)
    u = (frame - f0) / (f1 - f0)
    return state, (x0 + u * (x1 - x0), y0 + u * (y1 - y0))


def feed_lookahead(state: PredictorState, z: Measurement, frame: int) -> PredictorState:
    return replace(state, pending=(frame, z.x, z.y))


def ingest(state: PredictorState, z: Measurement, frame: int) -> PredictorState:
    """Apply a fresh measurement; Kalman variants run their update."""
    ring = (state.last_measurements + ((frame, z.x, z.y),))[-2:]
    if state.kind not in KALMAN_KINDS:
        pending = None if state.pending and state.pending[0] == frame else state.pending
        return replace(state, last_measurements=ring, pending=pending)

    filt = kalman.update(state.filter, z.x, z.y, state.meas, frame)
    if state.kind is PredictorKind.NO_VELOCITY_KALMAN:
        filt = _pin_velocity(filt)
    elif state.kind is PredictorKind.FIXED_COVARIANCE_KALMAN:
        filt = replace(filt, cov=state.frozen_cov.copy())
    return replace(state, filter=filt, last_measurements=ring)


def current_position(state: PredictorState) -> tuple[float, float]:
    if state.kind in KALMAN_KINDS:
        return state.filter.position()
    last = state.last_measurements[-1]
    return last[1], last[2]
