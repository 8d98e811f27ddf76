"""Counter-based deterministic randomness.

Every draw is a pure function of (seed, *tags): there is no shared generator
state, so concurrent callers and arbitrary call orders produce identical
streams. Tags are strings/ints identifying the draw site (instance id,
ordering, repetition index, purpose).
"""

from __future__ import annotations

import hashlib
import math

_SEP = b"\x1f"


def _digest64(seed: int, tags: tuple) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode())
    for tag in tags:
        h.update(_SEP)
        h.update(str(tag).encode())
    return int.from_bytes(h.digest(), "little")


def uniform01(seed: int, *tags) -> float:
    """Deterministic uniform in the open interval (0, 1)."""
    # +1 / 2**64+1 keeps the value strictly inside (0, 1), which matters for
    # the log() in gaussian() and for degenerate Bernoulli thresholds.
    return (_digest64(seed, tags) + 1.0) / (2.0**64 + 1.0)


def gaussian(seed: int, *tags) -> float:
    """Deterministic standard normal via Box-Muller; uses two sub-draws."""
    u1 = uniform01(seed, *tags, "bm-u1")
    u2 = uniform01(seed, *tags, "bm-u2")
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def derive_seed(seed: int, *tags) -> int:
    """Stable 63-bit sub-seed for an independent stream."""
    return _digest64(seed, tags) & 0x7FFF_FFFF_FFFF_FFFF
