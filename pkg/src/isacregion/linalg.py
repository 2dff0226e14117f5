"""Shared Hermitian-matrix helpers used by the information-matrix modules."""

from __future__ import annotations

import numpy as np

__all__ = [
    "hermitize",
    "eigh_descending",
    "phase_normalize",
    "numerical_rank",
]


def hermitize(h: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Symmetrize `h`; reject inputs whose asymmetry exceeds `tol` (relative)."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(np.abs(h).max(), 1.0)
    asym = np.abs(h - h.conj().T).max()
    if asym > tol * scale:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return 0.5 * (h + h.conj().T)


def phase_normalize(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Rotate `v` so its first non-negligible component is real positive."""
    idx = np.flatnonzero(np.abs(v) > tol * np.abs(v).max())
    if idx.size == 0:
        return v.copy()
    pivot = v[idx[0]]
    return v * (abs(pivot) / pivot)


def _lex_key(v: np.ndarray) -> tuple:
    w = phase_normalize(v)
    parts = np.round(np.concatenate([w.real, w.imag]), 12)
    return tuple(parts.tolist())


def eigh_descending(h: np.ndarray, tie_gap: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with descending eigenvalues and stable ordering.

    Within groups of near-equal eigenvalues (relative gap < `tie_gap`) the
    eigenvectors are reordered by a lexicographic key on their
    phase-normalized entries, so repeated runs produce identical output even
    when the subspace is degenerate.
    """
    vals, vecs = np.linalg.eigh(h)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    scale = max(abs(vals[0]), 1.0)
    start = 0
    n = len(vals)
    while start < n:
        stop = start + 1
        while stop < n and abs(vals[stop - 1] - vals[stop]) < tie_gap * scale:
            stop += 1
        if stop - start > 1:
            order = sorted(range(start, stop), key=lambda j: _lex_key(vecs[:, j]))
            vals[start:stop] = vals[order]
            vecs[:, start:stop] = vecs[:, order]
        start = stop
    return vals, vecs


def numerical_rank(eigenvalues: np.ndarray, rel_threshold: float = 1e-6) -> int:
    """Count of eigenvalues above `rel_threshold` times the largest one."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    top = eigenvalues.max(initial=0.0)
    if top <= 0:
        return 0
    return int(np.sum(eigenvalues > rel_threshold * top))
