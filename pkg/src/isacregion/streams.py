"""Deterministic random-stream derivation.

Every stochastic evaluation owns one generator derived from the scenario's
base seed plus an integer path, so results never depend on scheduling or
worker count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_rng"]

_MASK64 = (1 << 64) - 1


def derive_rng(base_seed: int, *path: int) -> np.random.Generator:
    """Generator for task `path` under `base_seed`; identical inputs,
    identical stream."""
    entropy = [int(base_seed) & _MASK64] + [int(p) & _MASK64 for p in path]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
