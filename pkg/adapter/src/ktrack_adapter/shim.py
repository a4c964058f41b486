"""Template for wrapping a real point tracker behind the stdio protocol.

Copy this file, fill in `MyTracker`, and launch the client with
`--tracker "external:python my_adapter.py"`. The serve loop handles all
framing, validation, and error reporting; your code only answers
"where are these points at this frame".

A real wrapper typically:
  * loads model weights once in __init__ (that cost lands before the
    handshake, which allows 10 s by default);
  * reads the frame image from `frame_payload_path` when the client
    supplies one, or maintains its own video handle;
  * returns valid=False for points it lost instead of guessing.

This template is intentionally not wired to any model; the mock mode in
serve.py is the tested reference implementation of the protocol.
"""

from __future__ import annotations

from typing import Sequence

from .serve import serve


class MyTracker:
    """Replace the body of track() with real inference."""

    name = "my-tracker"
    cost_hint_ms = 556.0  # honest per-call latency estimate for accounting

    def __init__(self):
        # e.g. self.model = load_model("weights.pt")
        raise NotImplementedError("fill in model loading")

    def track(
        self, frame: int, point_ids: Sequence[int], frame_payload_path: str | None
    ) -> list[tuple[int, float, float, bool]]:
        # e.g. image = read_image(frame_payload_path)
        #      xs, ys, ok = self.model.infer(image, point_ids)
        raise NotImplementedError("fill in inference")


def main() -> int:
    tracker = MyTracker()
    return serve(tracker.track, name=tracker.name, cost_hint_ms=tracker.cost_hint_ms)


if __name__ == "__main__":
    raise SystemExit(main())
