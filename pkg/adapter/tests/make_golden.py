#!/usr/bin/env python3
"""Regenerate the golden protocol transcript (requests + responses).

The committed files are authoritative; rerun this only when the protocol
version changes, and commit the diff deliberately.
"""

import json
import subprocess
import sys
from pathlib import Path

DATA = Path(__file__).parent / "data"


def main():
    DATA.mkdir(exist_ok=True)
    dataset = DATA / "golden_dataset.json"
    if not dataset.exists():
        subprocess.run(
            [
                "ktrack", "generate", "--out", str(dataset),
                "--grid", "5", "--frames", "30", "--seed", "1234",
                "--kind", "circular", "--radius", "12", "--angular-rate", "0.2",
            ],
            check=True,
        )

    requests = [
        {"type": "hello", "protocolVersion": 1, "pointIds": [0, 1, 2, 3, 4],
         "frameBounds": [640.0, 480.0]},
        {"type": "track", "frame": 0, "pointIds": [0, 1, 2, 3, 4]},
        {"type": "track", "frame": 1, "pointIds": [0, 1, 2, 3, 4]},
        {"type": "track", "frame": 2, "pointIds": [4, 2, 0]},  # order preserved
        {"type": "track", "frame": 15, "pointIds": [3]},
        {"type": "track", "frame": 99, "pointIds": [0]},  # -> error E_NO_FRAME
        {"type": "track", "frame": 5, "pointIds": [0, 9]},  # -> error E_UNKNOWN_POINT
        {"type": "track", "frame": 29, "pointIds": [0, 1, 2, 3, 4]},
    ]
    request_text = "".join(json.dumps(r) + "\n" for r in requests)

    proc = subprocess.run(
        [sys.executable, "-m", "ktrack_adapter", "--dataset", str(dataset),
         "--noise-std", "0.75", "--failure-prob", "0.2", "--seed", "42"],
        input=request_text,
        capture_output=True,
        text=True,
        check=True,
    )
    (DATA / "golden_requests.ndjson").write_text(request_text)
    (DATA / "golden_responses.ndjson").write_text(proc.stdout)
    print(f"wrote {len(requests)} requests and {len(proc.stdout.splitlines())} responses")


if __name__ == "__main__":
    main()
