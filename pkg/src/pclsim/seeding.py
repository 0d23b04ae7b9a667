"""Deterministic RNG substream derivation.

Every random draw in the simulator comes from a generator derived by hashing
(root seed, purpose tag, indices...) into a numpy SeedSequence, so that
changing one run's seed never perturbs another run's stream and parallel
execution is bit-identical to serial execution.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK = (1 << 64) - 1


def _as_entropy(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key) & _MASK


def child_sequence(seed: int, *keys) -> np.random.SeedSequence:
    """SeedSequence for the substream identified by (seed, *keys)."""
    return np.random.SeedSequence([_as_entropy(seed)] + [_as_entropy(k) for k in keys])


def substream(seed: int, *keys) -> np.random.Generator:
    """Generator for the substream identified by (seed, *keys)."""
    return np.random.default_rng(child_sequence(seed, *keys))
