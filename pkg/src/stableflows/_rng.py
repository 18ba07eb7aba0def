"""Deterministic seed derivation.

Every Monte Carlo routine takes either a ``numpy.random.Generator`` or a
64-bit stream key.  Replicate ``r`` of an experiment always draws from a
stream keyed by ``(master_seed, tag, r)``, so results do not depend on how
replicates are scheduled across workers.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_key", "generator", "child_keys"]


def derive_key(master_seed: int, *tags) -> int:
    """Derive a 64-bit stream key from a master seed and a tag tuple.

    Tags may be ints or strings; the derivation is a keyed blake2b hash, so
    distinct tag tuples give independent-looking keys and the mapping is
    stable across processes and platforms.
    """
    h = hashlib.blake2b(digest_size=8, key=int(master_seed).to_bytes(8, "little", signed=False))
    for t in tags:
        h.update(repr(t).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def generator(master_seed: int, *tags) -> np.random.Generator:
    """A numpy Generator on the stream keyed by ``(master_seed, *tags)``."""
    return np.random.Generator(np.random.Philox(key=derive_key(master_seed, *tags)))


def child_keys(master_seed: int, tag, n: int) -> np.ndarray:
    """Vector of per-replicate stream keys, uint64, one per replicate index."""
    base = derive_key(master_seed, tag)
    # splitmix64 walk from the tagged base; same sequence regardless of workers
    keys = np.empty(n, dtype=np.uint64)
    state = np.uint64(base)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    with np.errstate(over="ignore"):
        for i in range(n):
            state = state + gamma
            z = state
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            keys[i] = z ^ (z >> np.uint64(31))
    return keys
