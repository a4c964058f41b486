"""File formats: dataset JSON, results CSV, and deterministic SVG charts.

Datasets are versioned JSON documents; floats round-trip bit-exact because
both writer and reader go through Python's shortest-repr float formatting.
Results are plain CSV with a fixed, documented header; a '# config:' comment
line carries the fully-resolved run configuration. Appends are crash-safe:
a truncated final row is detected and dropped on read.

Charts are hand-written SVG with no timestamps or environment-dependent
content, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import NothingToPlotError, ParseError, UnsupportedVersionError
from .scheduler import SweepCell, ideal_inference_count, ScheduleConfig
from .synthgen import Dataset

DATASET_VERSION = 1

RESULT_COLUMNS = [
    "dataset",
    "tracker",
    "predictor",
    "n",
    "grid",
    "seed",
    "warmup",
    "sigma_p",
    "sigma_m",
    "sigma_v",
    "noise_std",
    "failure_prob",
    "cost_ms",
    "frames",
    "points",
    "tracker_calls",
    "failed_calls",
    "ideal_calls",
    "sim_cost_ms",
    "epe",
    "pck1",
    "pck2",
    "pck4",
    "pck5",
    "pck8",
    "pck16",
    "aj",
    "fps_sim",
    "speedup",
    "retention",
    "latency_frames",
    "error",
]


# --- datasets ---------------------------------------------------------------


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    doc = {
        "version": DATASET_VERSION,
        "frameBounds": [dataset.width, dataset.height],
        "T": dataset.frames,
        "provenance": dataset.provenance,
        "points": [
            {
                "id": pid,
                "track": [
                    [
                        float(dataset.positions[t, i, 0]),
                        float(dataset.positions[t, i, 1]),
                        bool(dataset.visible[t, i]),
                    ]
                    for t in range(dataset.frames)
                ],
            }
            for i, pid in enumerate(dataset.point_ids)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def read_dataset(path: str | Path) -> Dataset:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc

    version = doc.get("version")
    if version != DATASET_VERSION:
        raise UnsupportedVersionError(f"{path}: version {version!r}, expected {DATASET_VERSION}")
    for key in ("frameBounds", "T", "points"):
        if key not in doc:
            raise ParseError(f"{path}: missing field {key!r}")
    bounds = doc["frameBounds"]
    if not (isinstance(bounds, list) and len(bounds) == 2):
        raise ParseError(f"{path}: frameBounds must be [width, height]")
    T = doc["T"]
    points = doc["points"]
    if not isinstance(points, list) or not points:
        raise ParseError(f"{path}: points must be a non-empty list")

    P = len(points)
    positions = np.zeros((T, P, 2))
    visible = np.zeros((T, P), dtype=bool)
    ids = []
    for i, pt in enumerate(points):
        if "id" not in pt or "track" not in pt:
            raise ParseError(f"{path}: points[{i}] missing id/track")
        track = pt["track"]
        if len(track) != T:
            raise ParseError(
                f"{path}: points[{i}] track length {len(track)} != T={T}"
            )
        ids.append(int(pt["id"]))
        for t, entry in enumerate(track):
            if len(entry) != 3:
                raise ParseError(f"{path}: points[{i}].track[{t}] must be [x, y, visible]")
            x, y, vis = entry
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ParseError(f"{path}: points[{i}].track[{t}] has non-finite position")
            positions[t, i] = (x, y)
            visible[t, i] = bool(vis)
    if len(set(ids)) != len(ids):
        raise ParseError(f"{path}: duplicate point ids")

    return Dataset(
        positions=positions,
        visible=visible,
        point_ids=ids,
        width=float(bounds[0]),
        height=float(bounds[1]),
        provenance=doc.get("provenance", {}),
    )


# --- results tables ----------------------------------------------------------


def _cell_value(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cell_to_row(cell: SweepCell) -> dict:
    """Flatten one sweep cell into a results row."""
    r = cell.report
    row = {
        "dataset": cell.dataset_label,
        "tracker": cell.tracker,
        "predictor": cell.predictor,
        "n": cell.n,
        "grid": cell.grid,
        "seed": cell.seed,
        "warmup": cell.warmup,
        "sigma_p": cell.params.sigma_p,
        "sigma_m": cell.params.sigma_m,
        "sigma_v": cell.params.sigma_v,
        "noise_std": cell.oracle.noise_std,
        "failure_prob": cell.oracle.failure_prob,
        "cost_ms": cell.oracle.cost_ms,
        "error": cell.error,
    }
    if r is None:
        for col in RESULT_COLUMNS:
            row.setdefault(col, "")
        return row
    ideal = ideal_inference_count(ScheduleConfig(r.frames, max(1, cell.n), 0))
    row.update(
        {
            "frames": r.frames,
            "points": r.points,
            "tracker_calls": r.tracker_calls,
            "failed_calls": r.failed_calls,
            "ideal_calls": ideal,
            "sim_cost_ms": r.sim_cost_ms,
            "epe": r.epe,
            "pck1": r.pck[1.0],
            "pck2": r.pck[2.0],
            "pck4": r.pck[4.0],
            "pck5": r.pck[5.0],
            "pck8": r.pck[8.0],
            "pck16": r.pck[16.0],
            "aj": r.average_jaccard,
            "fps_sim": r.fps_sim,
            "speedup": r.speedup,
            "retention": r.retention,
            "latency_frames": r.latency_frames,
        }
    )
    return row


def format_results(rows: Sequence[Mapping], config: Mapping | None = None) -> str:
    """Render rows to CSV text with an embedded resolved-config comment."""
    buf = io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow([_cell_value(row.get(col)) for col in RESULT_COLUMNS])
    return buf.getvalue()


def write_results(rows: Sequence[Mapping], path: str | Path, config: Mapping | None = None) -> None:
    Path(path).write_text(format_results(rows, config))


def append_result(row: Mapping, path: str | Path, config: Mapping | None = None) -> None:
    """Append one row, writing the header (and config comment) on first use."""
    p = Path(path)
    new_file = not p.exists() or p.stat().st_size == 0
    with p.open("a") as fh:
        if new_file:
            if config is not None:
                fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
            csv.writer(fh, lineterminator="\n").writerow(RESULT_COLUMNS)
        csv.writer(fh, lineterminator="\n").writerow(
            [_cell_value(row.get(col)) for col in RESULT_COLUMNS]
        )


def read_results(path: str | Path) -> list[dict]:
    """Read a results table, dropping a truncated trailing row if present."""
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    ends_clean = raw.endswith("\n")
    lines = [ln for ln in raw.split("\n") if ln != ""]
    data_lines = [ln for ln in lines if not ln.startswith("#")]
    if not data_lines:
        raise ParseError(f"{path}: no header row")
    if not ends_clean:
        # Mid-write crash: the final line never got its newline.
        dropped = data_lines.pop()
        if not data_lines:
            raise ParseError(f"{path}: header truncated: {dropped[:40]!r}")

    header = next(csv.reader([data_lines[0]]))
    if header != RESULT_COLUMNS:
        raise ParseError(f"{path}: unexpected header {header[:4]}...")
    rows = []
    body = data_lines[1:]
    for i, line in enumerate(body):
        fields = next(csv.reader([line]))
        if len(fields) != len(RESULT_COLUMNS):
            if i == len(body) - 1:
                continue  # truncated final row from a crashed append
            raise ParseError(f"{path}: row {i + 1} has {len(fields)} fields")
        rows.append(dict(zip(RESULT_COLUMNS, fields)))
    return rows


# --- charts ------------------------------------------------------------------

_PALETTE = [
    "#1b6ca8",
    "#d1495b",
    "#66a182",
    "#edae49",
    "#775b9f",
    "#30638e",
    "#8c5e58",
    "#2e4052",
]

_CHART_W, _CHART_H = 720, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 180, 44, 52


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if (hi - lo) / (m * mag) <= target)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_chart(
    rows: Sequence[Mapping],
    x_key: str,
    y_key: str,
    series_key: str,
    out_path: str | Path,
    title: str = "",
    y_label: str | None = None,
    note: str = "",
) -> None:
    """Render one line chart (one series per distinct series_key value).

    Output bytes are a pure function of the inputs; rows with an empty or
    non-numeric y value are skipped. `note` (e.g. the originating run
    configuration) is embedded in the SVG description.
    """
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        try:
            x = float(row[x_key])
            y = float(row[y_key])
        except (KeyError, TypeError, ValueError):
            continue
        series.setdefault(str(row.get(series_key, "")), []).append((x, y))
    series = {k: sorted(v) for k, v in series.items() if v}
    if not series:
        raise NothingToPlotError(f"no plottable rows for {y_key} vs {x_key}")

    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pad = 0.05 * (y_hi - y_lo) or 0.5
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _CHART_W - _MARGIN_L - _MARGIN_R
    plot_h = _CHART_H - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    def fmt(v: float) -> str:
        return format(v, ".6g")

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_CHART_W}" height="{_CHART_H}" '
        f'viewBox="0 0 {_CHART_W} {_CHART_H}" font-family="sans-serif">',
        f"<desc>{_esc(y_key)} vs {_esc(x_key)} by {_esc(series_key)}"
        + (f" | {_esc(note)}" if note else "")
        + "</desc>",
        f'<rect width="{_CHART_W}" height="{_CHART_H}" fill="white"/>',
        f'<text x="{_CHART_W // 2}" y="24" text-anchor="middle" font-size="15">{_esc(title or y_key)}</text>',
    ]
    # Axes and ticks.
    out.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444" stroke-width="1"/>'
    )
    for tx in _nice_ticks(x_lo, x_hi):
        X = fmt(px(tx))
        out.append(
            f'<line x1="{X}" y1="{_MARGIN_T + plot_h}" x2="{X}" y2="{_MARGIN_T + plot_h + 5}" stroke="#444"/>'
        )
        out.append(
            f'<text x="{X}" y="{_MARGIN_T + plot_h + 20}" text-anchor="middle" font-size="11">{fmt(tx)}</text>'
        )
    for ty in _nice_ticks(y_lo, y_hi):
        Y = fmt(py(ty))
        out.append(f'<line x1="{_MARGIN_L - 5}" y1="{Y}" x2="{_MARGIN_L}" y2="{Y}" stroke="#444"/>')
        out.append(
            f'<text x="{_MARGIN_L - 9}" y="{Y}" text-anchor="end" dominant-baseline="middle" '
            f'font-size="11">{fmt(ty)}</text>'
        )
    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2}" y="{_CHART_H - 12}" text-anchor="middle" '
        f'font-size="12">{_esc(x_key)}</text>'
    )
    out.append(
        f'<text x="18" y="{_MARGIN_T + plot_h / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2})">{_esc(y_label or y_key)}</text>'
    )
    # Series.
    for idx, name in enumerate(sorted(series)):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{fmt(px(x))},{fmt(py(y))}" for x, y in series[name])
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for x, y in series[name]:
            out.append(f'<circle cx="{fmt(px(x))}" cy="{fmt(py(y))}" r="2.6" fill="{color}"/>')
        ly = _MARGIN_T + 14 + idx * 18
        lx = _MARGIN_L + plot_w + 12
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{color}" stroke-width="2.5"/>'
        )
        out.append(f'<text x="{lx + 24}" y="{ly}" font-size="11">{_esc(name)}</text>')
    out.append("</svg>")
    Path(out_path).write_text("\n".join(out) + "\n")
