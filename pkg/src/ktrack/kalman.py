"""Constant-velocity Kalman filter for a single tracked point.

State is [x, y, vx, vy] (pixels, pixels/frame) with a 4x4 covariance.
Position advances by velocity each frame; process noise models deviation
from that assumption, measurement noise models tracker output error.
All operations are value-semantic: they return new FilterState objects and
never mutate their inputs, so concurrent use on distinct states is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateUpdateError, InvalidParameterError

# Innovation covariances with a worse condition estimate than this are
# treated as failed measurements rather than inverted.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class KalmanParams:
    """Noise intensities and time step for one filter.

    sigma_p: process noise intensity, pixels/frame (deviation from constant
        velocity). sigma_m: measurement noise std, pixels. sigma_v: initial
        velocity std, pixels/frame (velocity is unknown at init, so the
        default prior is wide). dt: frames per step, 1 for video pipelines.
    """

    sigma_p: float = 0.1
    sigma_m: float = 0.3
    sigma_v: float = 10.0
    dt: float = 1.0

    def __post_init__(self):
        if self.sigma_p < 0:
            raise InvalidParameterError(f"sigma_p must be >= 0, got {self.sigma_p}")
        if self.sigma_m <= 0:
            raise InvalidParameterError(f"sigma_m must be > 0, got {self.sigma_m}")
        if self.sigma_v <= 0:
            raise InvalidParameterError(f"sigma_v must be > 0, got {self.sigma_v}")
        if self.dt <= 0:
            raise InvalidParameterError(f"dt must be > 0, got {self.dt}")


@dataclass
class MotionModel:
    F: np.ndarray  # 4x4 transition
    Q: np.ndarray  # 4x4 process noise covariance


@dataclass
class MeasurementModel:
    H: np.ndarray  # 2x4, extracts position from state
    R: np.ndarray  # 2x2 measurement noise covariance


@dataclass
class FilterState:
    mean: np.ndarray  # (4,) [x, y, vx, vy]
    cov: np.ndarray  # (4, 4), symmetric PSD
    last_measured_frame: int | None = None

    def position(self) -> tuple[float, float]:
        return float(self.mean[0]), float(self.mean[1])

    def velocity(self) -> tuple[float, float]:
        return float(self.mean[2]), float(self.mean[3])


def transition_matrix(dt: float = 1.0) -> np.ndarray:
    """Constant-velocity transition: position += velocity * dt.

    dt=0 is permitted (yields the identity) for test use.
    """
    if dt < 0:
        raise InvalidParameterError(f"dt must be >= 0, got {dt}")
    F = np.eye(4)
    F[0, 2] = dt
    F[1, 3] = dt
    return F


def process_noise(dt: float, sigma_p: float) -> np.ndarray:
    """Process noise covariance for a white-acceleration disturbance.

    The position/velocity blocks carry the dt^4/4, dt^3/2, dt^2 polynomial
    coupling of an acceleration integrated over one step, scaled by
    sigma_p^2.
    """
    if sigma_p < 0:
        raise InvalidParameterError(f"sigma_p must be >= 0, got {sigma_p}")
    d2 = dt * dt
    d3 = d2 * dt
    d4 = d3 * dt
    q = sigma_p * sigma_p
    return q * np.array(
        [
            [d4 / 4, 0.0, d3 / 2, 0.0],
            [0.0, d4 / 4, 0.0, d3 / 2],
            [d3 / 2, 0.0, d2, 0.0],
            [0.0, d3 / 2, 0.0, d2],
        ]
    )


def measurement_matrix() -> np.ndarray:
    """H = [I2 | 02]: trackers observe position directly."""
    H = np.zeros((2, 4))
    H[0, 0] = 1.0
    H[1, 1] = 1.0
    return H


def measurement_noise(sigma_m: float) -> np.ndarray:
    if sigma_m <= 0:
        raise InvalidParameterError(f"sigma_m must be > 0, got {sigma_m}")
    return (sigma_m * sigma_m) * np.eye(2)


def motion_model(params: KalmanParams) -> MotionModel:
    return MotionModel(
        F=transition_matrix(params.dt), Q=process_noise(params.dt, params.sigma_p)
    )


def measurement_model(params: KalmanParams) -> MeasurementModel:
    return MeasurementModel(H=measurement_matrix(), R=measurement_noise(params.sigma_m))


def init_filter(zx: float, zy: float, params: KalmanParams, frame: int = 0) -> FilterState:
    """Start a filter at the first measurement with zero velocity.

    Position uncertainty equals the measurement noise; velocity uncertainty
    is the wide sigma_v prior since nothing is known about motion yet.
    """
    if not (np.isfinite(zx) and np.isfinite(zy)):
        raise InvalidParameterError(f"initial measurement must be finite, got ({zx}, {zy})")
    mean = np.array([zx, zy, 0.0, 0.0])
    sm2 = params.sigma_m * params.sigma_m
    sv2 = params.sigma_v * params.sigma_v
    cov = np.diag([sm2, sm2, sv2, sv2])
    return FilterState(mean=mean, cov=cov, last_measured_frame=frame)


def _symmetrize(P: np.ndarray) -> np.ndarray:
    # Guards against asymmetry drift from repeated float matmuls.
    return (P + P.T) * 0.5


def predict(state: FilterState, model: MotionModel) -> FilterState:
    """Project state and covariance one step forward through the motion model.

    Uncertainty grows: trace(cov) strictly increases whenever Q is nonzero.
    """
    mean = model.F @ state.mean
    cov = _symmetrize(model.F @ state.cov @ model.F.T + model.Q)
    return FilterState(mean=mean, cov=cov, last_measured_frame=state.last_measured_frame)


def update(
    state: FilterState,
    zx: float,
    zy: float,
    model: MeasurementModel,
    frame: int,
) -> FilterState:
    """Correct the state with a position measurement via the Kalman gain.

    The gain blends prediction and measurement by their relative
    uncertainties; the posterior covariance (I - KH) P never has larger
    trace than the prior. The 2x2 innovation covariance is inverted in
    closed form; if its condition estimate exceeds CONDITION_LIMIT the
    measurement is rejected with DegenerateUpdateError.
    """
    H, R = model.H, model.R
    PHt = state.cov @ H.T  # (4, 2)
    S = H @ PHt + R  # (2, 2)

    a, b, c, d = S[0, 0], S[0, 1], S[1, 0], S[1, 1]
    det = a * d - b * c
    # Symmetric 2x2 eigenvalues in closed form for the condition estimate.
    half_tr = 0.5 * (a + d)
    disc = math.hypot(0.5 * (a - d), 0.5 * (b + c))
    lo = half_tr - disc
    hi = half_tr + disc
    if lo <= 0.0 or hi / lo > CONDITION_LIMIT:
        raise DegenerateUpdateError(
            f"innovation covariance near-singular (eigenvalues {lo:.3e}, {hi:.3e})"
        )
    Sinv = np.array([[d, -b], [-c, a]]) / det

    K = PHt @ Sinv  # (4, 2)
    innovation = np.array([zx, zy]) - H @ state.mean
    mean = state.mean + K @ innovation
    cov = _symmetrize((np.eye(4) - K @ H) @ state.cov)
    return FilterState(mean=mean, cov=cov, last_measured_frame=frame)
