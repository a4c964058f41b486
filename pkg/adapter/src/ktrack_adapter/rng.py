"""Counter-based draws, bit-compatible with the in-process oracle.

This file intentionally duplicates the generator pinned by the wire
protocol (docs/protocol.md in the core package): the adapter must not
import the core, and third parties need a standalone reference. Do not
"improve" the mixing without a protocol version bump.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

TAG_NOISE = 1
TAG_FAILURE = 2


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _key(parts: tuple[int, ...]) -> int:
    h = _GOLDEN
    for p in parts:
        h = _mix64((h + _GOLDEN + (p & _MASK64)) & _MASK64)
    return h


def uniform(*parts: int) -> float:
    bits = _mix64(_key(parts))
    return ((bits >> 11) + 1) * 2.0**-53


def uniforms(n: int, *parts: int) -> list[float]:
    base = _key(parts)
    return [((_mix64((base + i * _GOLDEN) & _MASK64) >> 11) + 1) * 2.0**-53 for i in range(n)]


def gauss_pair(*parts: int) -> tuple[float, float]:
    u1, u2 = uniforms(2, *parts)
    r = math.sqrt(-2.0 * math.log(u1))
    theta = 2.0 * math.pi * u2
    return r * math.cos(theta), r * math.sin(theta)
