"""Hybrid pipeline orchestration: warmup, keyframe dispatch, failure
skipping, and per-run accounting.

The tracker is invoked on every warmup frame and on every frame t with
t % N == 0 thereafter; all other frames are served purely by the
predictor. A failed per-point measurement at a keyframe skips that point's
update and continues on prediction; points never affect each other.

Costs are tracked two ways: a deterministic simulated cost (cost-per-call
times calls, used by every assertion and report) and informational
wall-clock time.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Sequence

import numpy as np

from . import metrics as metrics_mod
from . import predictors as pred_mod
from .errors import DegenerateUpdateError, InvalidParameterError, KTrackError, TransportError
from .kalman import KalmanParams
from .predictors import PredictorKind
from .synthgen import Dataset, TrajectorySpec, generate
from .trackers import OracleConfig, OracleTracker, TrackerSource


class FrameRole(Enum):
    WARMUP = "warmup"
    KEYFRAME = "keyframe"
    INTERMEDIATE = "intermediate"


class Provenance(IntEnum):
    MEASURED = 0
    PREDICTED = 1
    HELD_AFTER_FAILURE = 2


@dataclass(frozen=True)
class ScheduleConfig:
    total_frames: int
    keyframe_interval: int  # N >= 1; the baseline "tracker every frame" is N=1
    warmup_frames: int = 3  # W >= 0; W=0 starts directly at keyframe 0

    def __post_init__(self):
        if self.total_frames < 1:
            raise InvalidParameterError(f"total_frames must be >= 1, got {self.total_frames}")
        if self.keyframe_interval < 1:
            raise InvalidParameterError(
                f"keyframe_interval must be >= 1, got {self.keyframe_interval}"
            )
        if not (0 <= self.warmup_frames <= self.total_frames):
            raise InvalidParameterError(
                f"warmup_frames must be in [0, {self.total_frames}], got {self.warmup_frames}"
            )


def plan_schedule(config: ScheduleConfig) -> list[FrameRole]:
    """Role per frame: warmup for t < W, then keyframes at t % N == 0.

    Keyframes are anchored at absolute frame indices, so a warmup overlap
    (N < W) resolves in favor of warmup.
    """
    roles = []
    for t in range(config.total_frames):
        if t < config.warmup_frames:
            roles.append(FrameRole.WARMUP)
        elif t % config.keyframe_interval == 0:
            roles.append(FrameRole.KEYFRAME)
        else:
            roles.append(FrameRole.INTERMEDIATE)
    return roles


def inference_count(config: ScheduleConfig) -> int:
    """Exact number of tracker invocations for this schedule.

    With W=0 this is ceil(T/N); warmup frames add their own calls, so for
    long sequences the count approaches ceil(T/N) + (W - 1).
    """
    W, T, N = config.warmup_frames, config.total_frames, config.keyframe_interval
    keyframes = sum(1 for t in range(W, T) if t % N == 0)
    return W + keyframes


def ideal_inference_count(config: ScheduleConfig) -> int:
    """The warmup-free idealized count ceil(T/N)."""
    return math.ceil(config.total_frames / config.keyframe_interval)


@dataclass
class TrackResult:
    positions: np.ndarray  # (T, P, 2)
    provenance: np.ndarray  # (T, P) Provenance codes
    pred_visible: np.ndarray  # (T, P) bool
    point_ids: list[int]
    config: ScheduleConfig
    kind: PredictorKind
    tracker_calls: int = 0
    failed_calls: int = 0
    sim_cost_ms: float = 0.0
    wall_ms: float = 0.0
    latency_frames: int = 0
    incomplete: bool = False
    completed_frames: int = 0


def run_session(
    tracker: TrackerSource,
    dataset: Dataset,
    config: ScheduleConfig,
    kind: PredictorKind = PredictorKind.FULL_KALMAN,
    params: KalmanParams | None = None,
) -> TrackResult:
    """Drive one tracking session over the dataset's frames.

    Frame 0 initializes each point's predictor from its measurement.
    Warmup frames run predict-then-update every frame; keyframes do the
    same at interval N; intermediate frames record pure predictions.
    A frame-level transport failure aborts with a partial result flagged
    incomplete; per-point failures only skip that point's update.
    """
    params = params or KalmanParams()
    if dataset.frames < max(1, config.warmup_frames):
        raise InvalidParameterError("dataset shorter than warmup phase")
    if dataset.frames != config.total_frames:
        raise InvalidParameterError(
            f"dataset has {dataset.frames} frames, schedule expects {config.total_frames}"
        )

    T, P = dataset.frames, dataset.num_points
    ids = list(dataset.point_ids)
    roles = plan_schedule(config)
    N = config.keyframe_interval
    is_li = kind is PredictorKind.LINEAR_INTERPOLATION

    result = TrackResult(
        positions=np.zeros((T, P, 2)),
        provenance=np.full((T, P), Provenance.PREDICTED, dtype=np.uint8),
        pred_visible=np.zeros((T, P), dtype=bool),
        point_ids=ids,
        config=config,
        kind=kind,
        latency_frames=N if is_li else 0,
    )

    states: list[pred_mod.PredictorState | None] = [None] * P
    last_success: list[int | None] = [None] * P
    # Linear interpolation defers intermediate frames until the next
    # measurement arrives; (frame, provenance) per point.
    li_buffer: list[list[tuple[int, Provenance]]] = [[] for _ in range(P)]

    t_start = time.perf_counter()

    def record(t: int, j: int, pos: tuple[float, float], prov: Provenance) -> None:
        result.positions[t, j] = pos
        result.provenance[t, j] = prov
        gap_ok = last_success[j] is not None and (t - last_success[j]) <= N
        result.pred_visible[t, j] = gap_ok

    for t in range(T):
        role = roles[t]
        by_id = None
        if role is not FrameRole.INTERMEDIATE:
            try:
                measurements = tracker.query(t, ids)
            except TransportError:
                result.incomplete = True
                break
            result.tracker_calls += 1
            result.sim_cost_ms += tracker.cost_ms
            by_id = {m.point_id: m for m in measurements}

        for j, pid in enumerate(ids):
            m = by_id.get(pid) if by_id is not None else None
            st = states[j]

            if st is None:
                # Not yet initialized; wait for the first valid measurement.
                if m is not None and m.valid:
                    states[j] = pred_mod.init_predictor(kind, m, t, params)
                    last_success[j] = t
                    record(t, j, (m.x, m.y), Provenance.MEASURED)
                else:
                    if m is not None:
                        result.failed_calls += 1
                    record(t, j, (0.0, 0.0), Provenance.HELD_AFTER_FAILURE)
                continue

            if is_li:
                states[j] = _step_linear_interpolation(
                    st, m, t, j, li_buffer, last_success, record, result
                )
                continue

            st, pos = pred_mod.advance(st, t)
            prov = Provenance.PREDICTED
            if m is not None:
                if m.valid:
                    try:
                        st = pred_mod.ingest(st, m, t)
                        pos = pred_mod.current_position(st)
                        prov = Provenance.MEASURED
                        last_success[j] = t
                    except DegenerateUpdateError:
                        result.failed_calls += 1
                        prov = Provenance.HELD_AFTER_FAILURE
                else:
                    result.failed_calls += 1
                    prov = Provenance.HELD_AFTER_FAILURE
            states[j] = st
            record(t, j, pos, prov)

        result.completed_frames = t + 1

    # Flush interpolation buffers that never saw a next measurement: hold.
    if is_li:
        for j, buffered in enumerate(li_buffer):
            st = states[j]
            if st is None:
                continue
            for bt, prov in buffered:
                x, y = pred_mod.current_position(st)
                record(bt, j, (x, y), prov)

    result.wall_ms = (time.perf_counter() - t_start) * 1000.0
    return result


def _step_linear_interpolation(st, m, t, j, li_buffer, last_success, record, result):
    """Buffered-mode step for the lookahead baseline."""
    if m is not None and m.valid:
        st = pred_mod.feed_lookahead(st, m, t)
        for bt, prov in li_buffer[j]:
            st, pos = pred_mod.advance(st, bt)
            record(bt, j, pos, prov)
        li_buffer[j].clear()
        st, _ = pred_mod.advance(st, t)
        st = pred_mod.ingest(st, m, t)
        last_success[j] = t
        record(t, j, pred_mod.current_position(st), Provenance.MEASURED)
    elif m is not None:
        result.failed_calls += 1
        li_buffer[j].append((t, Provenance.HELD_AFTER_FAILURE))
    else:
        li_buffer[j].append((t, Provenance.PREDICTED))
    return st


def evaluate_session(
    result: TrackResult, dataset: Dataset, wall_override_ms: float | None = None
) -> metrics_mod.MetricReport:
    """Score one session against ground truth.

    Incomplete sessions are scored over their completed prefix only.
    """
    C = result.completed_frames
    pred = result.positions[:C]
    gt = dataset.positions[:C]
    vis = dataset.visible[:C]
    pck = {
        thr: metrics_mod.pck(pred, gt, thr, vis) for thr in metrics_mod.PCK_THRESHOLDS
    }
    wall_ms = result.wall_ms if wall_override_ms is None else wall_override_ms
    sim_s = result.sim_cost_ms / 1000.0
    wall_s = wall_ms / 1000.0
    return metrics_mod.MetricReport(
        epe=metrics_mod.epe(pred, gt, vis),
        pck=pck,
        average_jaccard=metrics_mod.average_jaccard(
            pred, result.pred_visible[:C], gt, vis
        ),
        fps_sim=(result.completed_frames / sim_s) if sim_s > 0 else float("inf"),
        fps_wall=(result.completed_frames / wall_s) if wall_s > 0 else float("inf"),
        tracker_calls=result.tracker_calls,
        failed_calls=result.failed_calls,
        sim_cost_ms=result.sim_cost_ms,
        wall_ms=wall_ms,
        frames=result.completed_frames,
        points=len(result.point_ids),
        latency_frames=result.latency_frames,
    )


@dataclass
class SweepCell:
    """One sweep run's identity and its scores, ready for tabulation."""

    dataset_label: str
    tracker: str
    predictor: str
    n: int  # requested interval; 0 means the per-frame baseline
    grid: int
    seed: int
    warmup: int
    params: KalmanParams
    oracle: OracleConfig
    report: metrics_mod.MetricReport | None
    error: str = ""


def run_sweep(
    base_spec: TrajectorySpec,
    oracle_cfg: OracleConfig,
    ns: Sequence[int],
    kinds: Sequence[PredictorKind],
    grid_sizes: Sequence[int],
    warmup: int,
    params: KalmanParams,
    seeds: Sequence[int] = (0,),
    on_cell=None,
) -> list[SweepCell]:
    """Cartesian sweep over grid size x interval x predictor x seed.

    n=0 denotes the per-frame baseline; each (grid, seed) pair's baseline
    is computed first so retention and speedup can be filled for the other
    cells. Per-cell errors are recorded and do not stop the sweep. Each
    finished cell is also handed to on_cell immediately, so callers can
    stream rows to disk as they are produced.
    """
    if not ns or not kinds or not grid_sizes:
        raise InvalidParameterError("sweep axes must be non-empty")
    cells: list[SweepCell] = []
    label = f"synthetic:{base_spec.kind.value}"

    for grid in grid_sizes:
        for seed in seeds:
            spec = replace(base_spec, num_points=grid, seed=seed)
            dataset = generate(spec)
            ocfg = replace(oracle_cfg, seed=seed)
            tracker = OracleTracker(dataset, ocfg)
            T = dataset.frames

            baseline_cfg = ScheduleConfig(T, 1, min(warmup, T))
            baseline_res = run_session(tracker, dataset, baseline_cfg, kinds[0], params)
            baseline = evaluate_session(baseline_res, dataset)

            for n in ns:
                eff_n = max(1, n)
                sched = ScheduleConfig(T, eff_n, min(warmup, T))
                for kind in kinds:
                    cell = SweepCell(
                        dataset_label=label,
                        tracker=tracker.name,
                        predictor=kind.value,
                        n=n,
                        grid=grid,
                        seed=seed,
                        warmup=warmup,
                        params=params,
                        oracle=ocfg,
                        report=None,
                    )
                    try:
                        if n == 0:
                            report = evaluate_session(
                                run_session(tracker, dataset, baseline_cfg, kind, params),
                                dataset,
                            )
                        else:
                            report = evaluate_session(
                                run_session(tracker, dataset, sched, kind, params), dataset
                            )
                        report.retention, report.speedup = metrics_mod.retention_and_speedup(
                            report, baseline
                        )
                        cell.report = report
                    except KTrackError as exc:
                        cell.error = f"{type(exc).__name__}: {exc}"
                    cells.append(cell)
                    if on_cell is not None:
                        on_cell(cell)
    return cells
