"""Deterministic synthetic trajectory datasets.

These stand in for annotated video at desk scale: each dataset carries
ground-truth positions and visibility per point per frame, and is a pure
function of its spec (seed included), so every run and every test sees the
same motion.

Four motion families cover the regimes the pipeline cares about:
constant velocity (the motion model's home turf), circular and sinusoidal
(smoothly turning, stresses longer prediction horizons), and piecewise
acceleration (jerky motion that breaks the constant-velocity assumption).
Trajectories reflect off the frame bounds instead of leaving the image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from . import rng
from .errors import InvalidSpecError


class TrajectoryKind(str, Enum):
    CONSTANT_VELOCITY = "constant-velocity"
    CIRCULAR = "circular"
    SINUSOIDAL = "sinusoidal"
    PIECEWISE_ACCELERATION = "piecewise-acceleration"


@dataclass(frozen=True)
class TrajectorySpec:
    kind: TrajectoryKind
    frames: int
    num_points: int = 1
    width: float = 640.0
    height: float = 480.0
    seed: int = 0
    # Explicit placement (tests, single-point checks). When None, points are
    # laid out on a lattice with per-point seeded draws.
    origin: tuple[float, float] | None = None
    velocity: tuple[float, float] | None = None
    center: tuple[float, float] | None = None
    phase: float | None = None
    # Kind parameters.
    speed: float = 2.0  # max carrier speed, px/frame
    radius: float = 20.0
    angular_rate: float = 0.1  # rad/frame
    amplitude: float = 10.0  # orthogonal oscillation, px
    period: float = 40.0  # frames
    accel_bound: float = 0.3  # px/frame^2
    segment_len: int = 30  # frames per acceleration segment
    # (point_id, frame_start, frame_end): ground truth invisible on
    # [frame_start, frame_end).
    occlusions: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if self.frames < 1:
            raise InvalidSpecError(f"frames must be >= 1, got {self.frames}")
        if self.num_points < 1:
            raise InvalidSpecError(f"num_points must be >= 1, got {self.num_points}")
        if self.width <= 0 or self.height <= 0:
            raise InvalidSpecError("frame bounds must be positive")
        if self.radius < 0:
            raise InvalidSpecError(f"radius must be >= 0, got {self.radius}")
        if self.period <= 0:
            raise InvalidSpecError(f"period must be > 0, got {self.period}")
        if self.segment_len < 1:
            raise InvalidSpecError(f"segment_len must be >= 1, got {self.segment_len}")
        if self.accel_bound < 0 or self.speed < 0 or self.amplitude < 0:
            raise InvalidSpecError("speed, amplitude and accel_bound must be >= 0")
        for pid, start, end in self.occlusions:
            if not (0 <= start <= end <= self.frames):
                raise InvalidSpecError(
                    f"occlusion window [{start}, {end}) outside [0, {self.frames})"
                )
            if not (0 <= pid < self.num_points):
                raise InvalidSpecError(f"occlusion point id {pid} out of range")


@dataclass
class Dataset:
    """Ground-truth tracks: positions (T, P, 2) and visibility (T, P)."""

    positions: np.ndarray
    visible: np.ndarray
    point_ids: list[int]
    width: float
    height: float
    provenance: dict = field(default_factory=dict)

    @property
    def frames(self) -> int:
        return self.positions.shape[0]

    @property
    def num_points(self) -> int:
        return self.positions.shape[1]

    def index_of(self, point_id: int) -> int:
        return self.point_ids.index(point_id)


def _lattice(n: int, lo_x: float, hi_x: float, lo_y: float, hi_y: float) -> list[tuple[float, float]]:
    """n points on a near-square grid inside the box."""
    cols = int(math.ceil(math.sqrt(n)))
    rows = int(math.ceil(n / cols))
    pts = []
    for i in range(n):
        r, c = divmod(i, cols)
        fx = (c + 1) / (cols + 1)
        fy = (r + 1) / (rows + 1)
        pts.append((lo_x + fx * (hi_x - lo_x), lo_y + fy * (hi_y - lo_y)))
    return pts


def _reflect(p: float, v: float, lo: float, hi: float) -> tuple[float, float]:
    # Fold position back into [lo, hi], flipping velocity per bounce.
    while p < lo or p > hi:
        if p < lo:
            p = 2 * lo - p
        else:
            p = 2 * hi - p
        v = -v
    return p, v


def _carrier_velocity(spec: TrajectorySpec, pid: int) -> tuple[float, float]:
    if spec.velocity is not None:
        return spec.velocity
    angle = 2 * math.pi * rng.uniform(spec.seed, pid, rng.TAG_VELOCITY, 0)
    mag = spec.speed * (0.2 + 0.8 * rng.uniform(spec.seed, pid, rng.TAG_VELOCITY, 1))
    return mag * math.cos(angle), mag * math.sin(angle)


def generate(spec: TrajectorySpec) -> Dataset:
    T, P = spec.frames, spec.num_points
    positions = np.zeros((T, P, 2))
    meta: dict = {"spec": _spec_dict(spec)}

    if spec.kind is TrajectoryKind.CIRCULAR:
        margin = spec.radius + 1.0
        if 2 * margin >= spec.width or 2 * margin >= spec.height:
            raise InvalidSpecError("radius does not fit inside frame bounds")
        if spec.center is not None:
            centers = [spec.center] * P
        else:
            centers = _lattice(P, margin, spec.width - margin, margin, spec.height - margin)
        meta["centers"] = [list(c) for c in centers]
        meta["radius"] = spec.radius
        for i in range(P):
            phase = (
                spec.phase
                if spec.phase is not None
                else 2 * math.pi * rng.uniform(spec.seed, i, rng.TAG_PHASE)
            )
            cx, cy = centers[i]
            for t in range(T):
                a = spec.angular_rate * t + phase
                positions[t, i, 0] = cx + spec.radius * math.cos(a)
                positions[t, i, 1] = cy + spec.radius * math.sin(a)

    elif spec.kind is TrajectoryKind.SINUSOIDAL:
        margin = spec.amplitude + 1.0
        if 2 * margin >= spec.width or 2 * margin >= spec.height:
            raise InvalidSpecError("amplitude does not fit inside frame bounds")
        starts = (
            [spec.origin] * P
            if spec.origin is not None
            else _lattice(P, margin, spec.width - margin, margin, spec.height - margin)
        )
        for i in range(P):
            x, y = starts[i]
            vx, vy = _carrier_velocity(spec, i)
            phase = (
                spec.phase
                if spec.phase is not None
                else 2 * math.pi * rng.uniform(spec.seed, i, rng.TAG_PHASE)
            )
            for t in range(T):
                osc = spec.amplitude * math.sin(2 * math.pi * t / spec.period + phase)
                speed = math.hypot(vx, vy)
                if speed > 0:
                    nx, ny = -vy / speed, vx / speed
                else:
                    nx, ny = 0.0, 1.0
                positions[t, i, 0] = x + osc * nx
                positions[t, i, 1] = y + osc * ny
                x, vx = _reflect(x + vx, vx, margin, spec.width - margin)
                y, vy = _reflect(y + vy, vy, margin, spec.height - margin)

    else:  # constant velocity / piecewise acceleration share the integrator
        starts = (
            [spec.origin] * P
            if spec.origin is not None
            else _lattice(P, spec.width * 0.1, spec.width * 0.9, spec.height * 0.1, spec.height * 0.9)
        )
        piecewise = spec.kind is TrajectoryKind.PIECEWISE_ACCELERATION
        for i in range(P):
            x, y = starts[i]
            vx, vy = _carrier_velocity(spec, i)
            for t in range(T):
                positions[t, i] = (x, y)
                if piecewise:
                    seg = t // spec.segment_len
                    u1, u2 = rng.uniforms(2, spec.seed, i, rng.TAG_ACCEL, seg)
                    vx += spec.accel_bound * (2 * u1 - 1)
                    vy += spec.accel_bound * (2 * u2 - 1)
                x, vx = _reflect(x + vx, vx, 0.0, spec.width)
                y, vy = _reflect(y + vy, vy, 0.0, spec.height)

    visible = np.ones((T, P), dtype=bool)
    for pid, start, end in spec.occlusions:
        visible[start:end, pid] = False

    return Dataset(
        positions=positions,
        visible=visible,
        point_ids=list(range(P)),
        width=spec.width,
        height=spec.height,
        provenance=meta,
    )


def _spec_dict(spec: TrajectorySpec) -> dict:
    d = asdict(spec)
    d["kind"] = spec.kind.value
    d["occlusions"] = [list(w) for w in spec.occlusions]
    return d
