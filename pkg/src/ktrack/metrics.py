"""Evaluation metrics over predicted tracks vs. ground truth.

EPE and PCK are gated on ground-truth visibility only (the standard
point-tracking evaluation convention). Average Jaccard follows the
TAP-Vid convention: Jaccard of jointly-correct position and visibility at
thresholds {1, 2, 4, 8, 16} px, averaged. FPS and speedup come in a
deterministic simulated-cost flavor (used by all assertions) and an
informational wall-clock flavor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UndefinedMetricError

JACCARD_THRESHOLDS = (1.0, 2.0, 4.0, 8.0, 16.0)
PCK_THRESHOLDS = (1.0, 2.0, 4.0, 5.0, 8.0, 16.0)


@dataclass
class MetricReport:
    epe: float
    pck: dict[float, float]  # threshold px -> fraction
    average_jaccard: float
    fps_sim: float
    fps_wall: float
    tracker_calls: int
    failed_calls: int
    sim_cost_ms: float
    wall_ms: float
    frames: int
    points: int
    latency_frames: int = 0
    speedup: float | None = None  # vs. per-frame baseline, simulated cost
    retention: float | None = None  # PCK@5px / baseline PCK@5px
    extra: dict = field(default_factory=dict)

    @property
    def pck5(self) -> float:
        return self.pck[5.0]


def _errors(pred: np.ndarray, gt: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum((pred - gt) ** 2, axis=-1))


def epe(pred: np.ndarray, gt: np.ndarray, visibility: np.ndarray) -> float:
    """Mean Euclidean error over ground-truth-visible (frame, point) pairs."""
    vis = np.asarray(visibility, dtype=bool)
    if not vis.any():
        raise UndefinedMetricError("EPE undefined: zero visible pairs")
    return float(_errors(pred, gt)[vis].mean())


def pck(pred: np.ndarray, gt: np.ndarray, threshold: float, visibility: np.ndarray) -> float:
    """Fraction of visible pairs with error <= threshold."""
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    vis = np.asarray(visibility, dtype=bool)
    if not vis.any():
        raise UndefinedMetricError("PCK undefined: zero visible pairs")
    return float((_errors(pred, gt)[vis] <= threshold).mean())


def average_jaccard(
    pred: np.ndarray,
    pred_visible: np.ndarray,
    gt: np.ndarray,
    gt_visible: np.ndarray,
) -> float:
    """Mean over thresholds of TP / (TP + FP + FN).

    TP: predicted visible, actually visible, within threshold.
    FP: predicted visible but occluded or outside threshold.
    FN: actually visible but predicted occluded or outside threshold.
    """
    pvis = np.asarray(pred_visible, dtype=bool)
    gvis = np.asarray(gt_visible, dtype=bool)
    if not gvis.any():
        raise UndefinedMetricError("AJ undefined: zero ground-truth-visible pairs")
    err = _errors(pred, gt)
    scores = []
    for thr in JACCARD_THRESHOLDS:
        within = err <= thr
        tp = int(np.sum(pvis & gvis & within))
        fp = int(np.sum(pvis & (~gvis | ~within)))
        fn = int(np.sum(gvis & (~pvis | ~within)))
        denom = tp + fp + fn
        scores.append(tp / denom if denom else 0.0)
    return float(np.mean(scores))


def retention_and_speedup(
    report: MetricReport, baseline: MetricReport
) -> tuple[float, float]:
    """Accuracy retained and cost saved relative to a per-frame baseline.

    The baseline must come from the same dataset and seed with the tracker
    invoked at every frame.
    """
    if baseline.pck5 == 0:
        raise UndefinedMetricError("retention undefined: baseline PCK@5px is zero")
    if report.sim_cost_ms == 0:
        raise UndefinedMetricError("speedup undefined: method cost is zero")
    retention = report.pck5 / baseline.pck5
    speedup = baseline.sim_cost_ms / report.sim_cost_ms
    return retention, speedup
