"""Deterministic JSON/CSV emission helpers.

Complex matrices are stored as nested lists of [re, im] pairs.  All CSV
floats are written with 17 significant digits so files round-trip exactly
and re-runs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = [
    "complex_to_pairs",
    "pairs_to_complex",
    "fmt17",
    "dump_json",
    "load_json",
]


def complex_to_pairs(matrix: np.ndarray) -> list:
    """Nested [re, im] representation of a complex array."""
    arr = np.asarray(matrix, dtype=complex)
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def pairs_to_complex(data: list) -> np.ndarray:
    """Inverse of `complex_to_pairs`."""
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("expected trailing [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def fmt17(x: float) -> str:
    """Fixed 17-significant-digit decimal form (round-trips float64)."""
    return format(float(x), ".17g")


def dump_json(obj, path: str | Path) -> None:
    """Write `obj` as JSON with sorted keys and a trailing newline."""
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n")


def load_json(path: str | Path):
    return json.loads(Path(path).read_text())
