#!/usr/bin/env python3
"""Replays the response side of a recorded transcript, line by line.

Usage: python replay_adapter.py TRANSCRIPT_FILE
The file holds one response JSON line per line, handshake first. Requests
are consumed and ignored; responses come verbatim from the recording.
"""

import sys

responses = open(sys.argv[1]).read().splitlines()
idx = 0
for _request in sys.stdin:
    if idx >= len(responses):
        break
    sys.stdout.write(responses[idx] + "\n")
    sys.stdout.flush()
    idx += 1
