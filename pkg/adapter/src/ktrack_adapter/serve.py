"""Protocol loop: hello handshake, then one trackResult per track request.

Two modes. Mock replays a dataset file plus seeded noise, reproducing the
core package's in-process oracle bit-for-bit (see rng.py); it exists for
integration tests and dual-path equivalence runs. Shim wires a
user-supplied callable to the same loop for wrapping real trackers (see
shim.py for the contract).

The loop never crashes on malformed input: anything unparseable gets an
error response with a stable code.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import rng
from .datafile import DatasetError, ReplayDataset, load_dataset

PROTOCOL_VERSION = 1

# (frame, point_ids, frame_payload_path) -> [(point_id, x, y, valid), ...]
TrackFn = Callable[[int, Sequence[int], str | None], list[tuple[int, float, float, bool]]]


@dataclass(frozen=True)
class MockConfig:
    dataset_path: str
    noise_std: float = 0.0
    failure_prob: float = 0.0
    seed: int = 0
    name: str = "mock"
    cost_hint_ms: float = 556.0


def mock_track_fn(dataset: ReplayDataset, cfg: MockConfig) -> TrackFn:
    def track(frame: int, point_ids: Sequence[int], _payload: str | None):
        out = []
        for pid in point_ids:
            gx, gy = dataset.position(frame, pid)
            nx, ny = rng.gauss_pair(cfg.seed, frame, pid, rng.TAG_NOISE)
            x = gx + cfg.noise_std * nx
            y = gy + cfg.noise_std * ny
            valid = dataset.visible(frame, pid)
            if cfg.failure_prob > 0.0:
                if rng.uniform(cfg.seed, frame, pid, rng.TAG_FAILURE) <= cfg.failure_prob:
                    valid = False
            out.append((pid, x, y, valid))
        return out

    return track


def _emit(obj: dict, out) -> None:
    out.write(json.dumps(obj) + "\n")
    out.flush()


def _error(code: str, message: str, out) -> None:
    _emit({"type": "error", "code": code, "message": message}, out)


def serve(
    track_fn: TrackFn,
    name: str,
    cost_hint_ms: float,
    known_ids: Sequence[int] | None = None,
    frames: int | None = None,
    stdin=None,
    stdout=None,
) -> int:
    """Run the request loop until stdin closes. Returns an exit code."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    hello_line = stdin.readline()
    if not hello_line:
        return 1
    try:
        hello = json.loads(hello_line)
    except json.JSONDecodeError:
        _error("E_BAD_REQUEST", "hello is not valid JSON", stdout)
        return 1
    if hello.get("type") != "hello":
        _error("E_BAD_REQUEST", f"expected hello, got {hello.get('type')!r}", stdout)
        return 1
    if hello.get("protocolVersion") != PROTOCOL_VERSION:
        _error(
            "E_VERSION",
            f"unsupported protocol version {hello.get('protocolVersion')!r}",
            stdout,
        )
        return 1
    _emit(
        {
            "type": "helloAck",
            "protocolVersion": PROTOCOL_VERSION,
            "trackerName": name,
            "costHint": cost_hint_ms,
        },
        stdout,
    )

    for line in stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            _error("E_BAD_REQUEST", "request is not valid JSON", stdout)
            continue
        if req.get("type") != "track":
            _error("E_UNSUPPORTED", f"unsupported request type {req.get('type')!r}", stdout)
            continue
        try:
            frame = int(req["frame"])
            point_ids = [int(p) for p in req["pointIds"]]
        except (KeyError, TypeError, ValueError):
            _error("E_BAD_REQUEST", "track needs integer frame and pointIds", stdout)
            continue
        if frames is not None and not (0 <= frame < frames):
            _error("E_NO_FRAME", f"frame {frame} outside [0, {frames})", stdout)
            continue
        if known_ids is not None:
            unknown = [p for p in point_ids if p not in known_ids]
            if unknown:
                _error("E_UNKNOWN_POINT", f"unknown point ids {unknown}", stdout)
                continue
        try:
            measurements = track_fn(frame, point_ids, req.get("framePayloadPath"))
        except Exception as exc:  # adapter must answer, not die
            _error("E_TRACKER", f"{type(exc).__name__}: {exc}", stdout)
            continue
        _emit(
            {
                "type": "trackResult",
                "frame": frame,
                "measurements": [
                    {"pointId": pid, "x": x, "y": y, "valid": valid}
                    for pid, x, y, valid in measurements
                ],
            },
            stdout,
        )
    return 0


def serve_mock(cfg: MockConfig, stdin=None, stdout=None) -> int:
    try:
        dataset = load_dataset(cfg.dataset_path)
    except DatasetError as exc:
        print(f"ktrack-adapter: {exc}", file=sys.stderr)
        return 2
    return serve(
        mock_track_fn(dataset, cfg),
        name=cfg.name,
        cost_hint_ms=cfg.cost_hint_ms,
        known_ids=set(dataset.point_ids),
        frames=dataset.frames,
        stdin=stdin,
        stdout=stdout,
    )
