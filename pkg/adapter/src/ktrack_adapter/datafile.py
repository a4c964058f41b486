"""Minimal reader for version-1 dataset JSON files (stdlib only)."""

from __future__ import annotations

import json
from pathlib import Path


class DatasetError(ValueError):
    pass


class ReplayDataset:
    """Ground-truth tracks indexed by point id."""

    def __init__(self, frames: int, tracks: dict[int, list[tuple[float, float, bool]]]):
        self.frames = frames
        self.tracks = tracks

    @property
    def point_ids(self) -> list[int]:
        return list(self.tracks)

    def position(self, frame: int, point_id: int) -> tuple[float, float]:
        x, y, _ = self.tracks[point_id][frame]
        return x, y

    def visible(self, frame: int, point_id: int) -> bool:
        return self.tracks[point_id][frame][2]


def load_dataset(path: str | Path) -> ReplayDataset:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DatasetError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON at line {exc.lineno}") from exc
    if doc.get("version") != 1:
        raise DatasetError(f"{path}: unsupported version {doc.get('version')!r}")
    frames = doc["T"]
    tracks: dict[int, list[tuple[float, float, bool]]] = {}
    for pt in doc["points"]:
        track = [(float(x), float(y), bool(v)) for x, y, v in pt["track"]]
        if len(track) != frames:
            raise DatasetError(f"{path}: point {pt['id']} track length != T")
        tracks[int(pt["id"])] = track
    if not tracks:
        raise DatasetError(f"{path}: no points")
    return ReplayDataset(frames, tracks)
