"""Seeded random streams.

Every consumer of randomness draws from a ``numpy.random.Generator`` backed by
PCG64 (PCG XSL RR 128/64, O'Neill 2014). A stream is identified by the master
seed plus a name and optional integer indices, e.g. ``stream(42, "forest", 3)``.
The name is hashed with SHA-256 so stream identity does not depend on Python's
randomized ``hash()``.
"""

import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _name_key(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(seed: int, name: str, *indices: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, name, *indices)``."""
    if not 0 <= seed <= SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=(_name_key(name), *indices))
    return np.random.Generator(np.random.PCG64(ss))
