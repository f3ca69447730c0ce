"""Deterministic substream derivation for reproducible randomized searches.

Every randomized operation takes a master seed and derives independent
generators from (seed, path) pairs, so results do not depend on execution
order and parallel schedules cannot change them.
"""

import numpy as np

from .errors import InputError


def substream(seed, *path):
    """Generator for the substream addressed by ``path`` under ``seed``."""
    seed = int(seed)
    if seed < 0:
        raise InputError("seed must be nonnegative")
    key = tuple(int(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derive_seed(seed, *path):
    """Child master seed for a nested operation, stable under ``path``."""
    return int(substream(seed, *path).integers(0, 2**62))
