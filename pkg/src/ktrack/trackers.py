"""Measurement sources: the black-box tracker interface and the built-in
synthetic oracle.

A tracker is anything that answers "where are these points at frame t" with
one Measurement per requested point. The oracle perturbs dataset ground
truth with Gaussian noise and configurable failures, standing in for an
expensive neural tracker at desk scale. Every draw is counter-based
(keyed by seed, frame, point id), so measurements are identical regardless
of query order, batching, or which other points were asked for.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from . import rng
from .errors import ProtocolError
from .synthgen import Dataset


@dataclass(frozen=True)
class Measurement:
    point_id: int
    x: float
    y: float
    valid: bool = True


class TrackerSource(Protocol):
    """Behavioral contract every measurement source satisfies."""

    name: str
    cost_ms: float

    def query(self, frame: int, point_ids: Sequence[int]) -> list[Measurement]: ...


@dataclass(frozen=True)
class OracleConfig:
    noise_std: float = 0.0  # px, i.i.d. Gaussian per axis
    failure_prob: float = 0.0  # per point per call
    # (point_id, frame_start, frame_end): tracker fails on [start, end)
    # even though ground truth may be visible.
    occlusion_windows: tuple[tuple[int, int, int], ...] = ()
    # Default emulates a heavyweight tracker (~1.8 FPS per-frame baseline).
    cost_ms: float = 556.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.failure_prob <= 1.0):
            raise ValueError(f"failure_prob must be in [0, 1], got {self.failure_prob}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")


class OracleTracker:
    """Replays dataset ground truth plus seeded noise and failures."""

    def __init__(self, dataset: Dataset, cfg: OracleConfig):
        self.dataset = dataset
        self.cfg = cfg
        self.name = "oracle"
        self.cost_ms = cfg.cost_ms
        self._index = {pid: i for i, pid in enumerate(dataset.point_ids)}

    def query(self, frame: int, point_ids: Sequence[int]) -> list[Measurement]:
        if frame < 0 or frame >= self.dataset.frames:
            raise ProtocolError(f"frame {frame} outside dataset length {self.dataset.frames}")
        out = []
        for pid in point_ids:
            idx = self._index.get(pid)
            if idx is None:
                raise ProtocolError(f"unknown point id {pid}")
            out.append(oracle_measurement(self.dataset, self.cfg, frame, pid, idx))
        return out


def oracle_measurement(
    dataset: Dataset, cfg: OracleConfig, frame: int, point_id: int, idx: int
) -> Measurement:
    gx, gy = dataset.positions[frame, idx]
    nx, ny = rng.gauss_pair(cfg.seed, frame, point_id, rng.TAG_NOISE)
    x = float(gx) + cfg.noise_std * nx
    y = float(gy) + cfg.noise_std * ny

    valid = bool(dataset.visible[frame, idx])
    for pid, start, end in cfg.occlusion_windows:
        if pid == point_id and start <= frame < end:
            valid = False
    if cfg.failure_prob > 0.0:
        if rng.uniform(cfg.seed, frame, point_id, rng.TAG_FAILURE) <= cfg.failure_prob:
            valid = False
    return Measurement(point_id=point_id, x=x, y=y, valid=valid)
