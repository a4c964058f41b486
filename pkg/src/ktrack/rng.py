"""Counter-based deterministic random draws.

Every draw is a pure function of a key tuple (seed, frame, point id, stream
tag, ...), so results do not depend on query order, batching, or how many
draws other points consumed. This is what makes oracle measurements
reproducible across in-process runs, sweep re-orderings, and external
adapter processes.

The mixer is the splitmix64 finalizer; uniforms take the top 53 bits of the
mixed key. Gaussians come from one Box-Muller transform per key. The exact
algorithm is part of the adapter wire contract (see docs/protocol.md) and
must not change without a protocol version bump.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Stream tags keep draws for different purposes statistically independent
# even when the rest of the key collides.
TAG_NOISE = 1
TAG_FAILURE = 2
TAG_VELOCITY = 3
TAG_PHASE = 4
TAG_ACCEL = 5
TAG_RADIUS = 6


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
    """Uniform draw in (0, 1], keyed by the integer tuple."""
    bits = _mix64(_key(parts))
    return ((bits >> 11) + 1) * 2.0**-53


def uniforms(n: int, *parts: int) -> list[float]:
    """n independent uniform draws for one key, indexed sub-streams."""
    base = _key(parts)
    return [((_mix64((base + i * _GOLDEN) & _MASK64) >> 11) + 1) * 2.0**-53 for i in range(n)]


def gauss_pair(*parts: int) -> tuple[float, float]:
    """Two independent standard normal draws (Box-Muller) for one key."""
    u1, u2 = uniforms(2, *parts)
    r = math.sqrt(-2.0 * math.log(u1))
    theta = 2.0 * math.pi * u2
    return r * math.cos(theta), r * math.sin(theta)
