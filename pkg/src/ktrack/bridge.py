"""Client side of the external-tracker wire protocol.

An adapter is a child process speaking newline-delimited JSON on its
standard streams: one hello/helloAck handshake, then strictly alternating
track/trackResult exchanges (one request in flight, ever). The grammar is
documented in docs/protocol.md; adapters for real trackers only need to
answer these two message kinds.

Responses are validated strictly: the echoed frame index must match, the
measurement set must be exactly the requested point ids, and malformed or
partial lines reject the whole response. Numbers travel as JSON decimals
with shortest-round-trip precision, so a well-behaved adapter reproduces
in-process measurement values exactly.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from queue import Empty, Queue
from typing import Sequence

from .errors import (
    SessionOpenError,
    TrackerReportedError,
    TransportError,
    VersionMismatchError,
)
from .trackers import Measurement

PROTOCOL_VERSION = 1
HELLO_TIMEOUT_S = 10.0
TRACK_TIMEOUT_S = 30.0


@dataclass
class Session:
    proc: subprocess.Popen
    tracker_name: str = ""
    cost_hint_ms: float = 0.0
    handshake_ms: float = 0.0
    track_timeout_s: float = TRACK_TIMEOUT_S
    transcript: list[tuple[str, str]] | None = None
    _lines: Queue = field(default_factory=Queue)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def _send(self, obj: dict) -> None:
        line = json.dumps(obj)
        if self.transcript is not None:
            self.transcript.append(("request", line))
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"adapter stdin closed: {exc}") from exc

    def _recv(self, timeout: float) -> dict:
        try:
            line = self._lines.get(timeout=timeout)
        except Empty:
            raise TransportError(f"no response within {timeout}s") from None
        if line is None:
            raise TransportError("adapter closed its output stream")
        if self.transcript is not None:
            self.transcript.append(("response", line))
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TransportError(f"malformed response line: {line[:120]!r}") from exc
        if not isinstance(msg, dict) or "type" not in msg:
            raise TransportError(f"response is not a typed object: {line[:120]!r}")
        return msg

    def close(self) -> None:
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=2.0)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()


def _reader(proc: subprocess.Popen, lines: Queue) -> None:
    for raw in proc.stdout:
        lines.put(raw.rstrip("\n"))
    lines.put(None)


def session_open(
    command: str | Sequence[str],
    point_ids: Sequence[int],
    frame_bounds: tuple[float, float],
    hello_timeout_s: float = HELLO_TIMEOUT_S,
    track_timeout_s: float = TRACK_TIMEOUT_S,
    record_transcript: bool = False,
) -> Session:
    """Spawn an adapter and complete the hello handshake."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=None,
            text=True,
            bufsize=1,
        )
    except OSError as exc:
        raise SessionOpenError(f"cannot spawn adapter {argv!r}: {exc}") from exc

    session = Session(
        proc=proc,
        track_timeout_s=track_timeout_s,
        transcript=[] if record_transcript else None,
    )
    threading.Thread(target=_reader, args=(proc, session._lines), daemon=True).start()

    t0 = time.perf_counter()
    try:
        session._send(
            {
                "type": "hello",
                "protocolVersion": PROTOCOL_VERSION,
                "pointIds": list(point_ids),
                "frameBounds": list(frame_bounds),
            }
        )
        ack = session._recv(hello_timeout_s)
    except TransportError as exc:
        session.close()
        raise SessionOpenError(f"handshake failed: {exc}") from exc
    session.handshake_ms = (time.perf_counter() - t0) * 1000.0

    if ack.get("type") == "error":
        session.close()
        raise SessionOpenError(f"adapter refused hello: {ack.get('message')}")
    if ack.get("type") != "helloAck":
        session.close()
        raise SessionOpenError(f"expected helloAck, got {ack.get('type')!r}")
    version = ack.get("protocolVersion", PROTOCOL_VERSION)
    if version != PROTOCOL_VERSION:
        session.close()
        raise VersionMismatchError(
            f"adapter speaks protocol {version}, this build speaks {PROTOCOL_VERSION}"
        )
    session.tracker_name = str(ack.get("trackerName", "external"))
    session.cost_hint_ms = float(ack.get("costHint", 0.0))
    return session


def session_track(
    session: Session,
    frame: int,
    point_ids: Sequence[int],
    frame_payload_path: str | None = None,
) -> list[Measurement]:
    """One strictly-validated track exchange; returns request order."""
    req: dict = {"type": "track", "frame": frame, "pointIds": list(point_ids)}
    if frame_payload_path is not None:
        req["framePayloadPath"] = frame_payload_path

    with session._lock:
        session._send(req)
        msg = session._recv(session.track_timeout_s)

    if msg.get("type") == "error":
        raise TrackerReportedError(str(msg.get("code", "unknown")), str(msg.get("message", "")))
    if msg.get("type") != "trackResult":
        raise TransportError(f"expected trackResult, got {msg.get('type')!r}")
    if msg.get("frame") != frame:
        raise TransportError(f"frame echo mismatch: sent {frame}, got {msg.get('frame')!r}")

    raw = msg.get("measurements")
    if not isinstance(raw, list):
        raise TransportError("trackResult without measurements list")
    by_id: dict[int, Measurement] = {}
    for entry in raw:
        try:
            m = Measurement(
                point_id=int(entry["pointId"]),
                x=float(entry["x"]),
                y=float(entry["y"]),
                valid=bool(entry["valid"]),
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise TransportError(f"malformed measurement entry: {entry!r}") from exc
        if m.point_id in by_id:
            raise TransportError(f"duplicate measurement for point {m.point_id}")
        by_id[m.point_id] = m

    requested = set(point_ids)
    got = set(by_id)
    if got != requested:
        missing = sorted(requested - got)
        extra = sorted(got - requested)
        raise TransportError(f"measurement id mismatch: missing {missing}, extra {extra}")
    return [by_id[pid] for pid in point_ids]


class ExternalTracker:
    """TrackerSource adapter over an open protocol session."""

    def __init__(self, session: Session, cost_ms: float | None = None):
        self.session = session
        self.name = f"external:{session.tracker_name}"
        self.cost_ms = session.cost_hint_ms if cost_ms is None else cost_ms

    def query(self, frame: int, point_ids: Sequence[int]) -> list[Measurement]:
        return session_track(self.session, frame, point_ids)
