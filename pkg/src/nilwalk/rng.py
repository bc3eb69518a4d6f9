"""Deterministic, order-independent random streams.

Streams are built on Philox (a counter-based generator) keyed by a root seed
plus an arbitrary tuple of integer subkeys, so replica k of experiment j
always sees the same stream no matter how work is scheduled across workers.
"""

from __future__ import annotations

import os

import numpy as np


def stream(seed: int, *subkeys: int) -> np.random.Generator:
    """Generator for the (seed, *subkeys) slot; independent across slots."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in subkeys))
    return np.random.Generator(np.random.Philox(ss))


def worker_count(default: int = 1) -> int:
    """Worker cap from the NILWALK_THREADS environment variable."""
    raw = os.environ.get("NILWALK_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return default
    return max(1, n)
