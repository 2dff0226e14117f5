"""Candidate beam-direction catalog.

Per-target information eigenvectors give single-angle beams; eigenvectors of
the two optimal covariances give the joint-sensing and communication beams.
Every entry is phase-normalized so the catalog is a pure function of its
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jsonio import complex_to_pairs, pairs_to_complex
from .linalg import phase_normalize
from .optimize import CovarianceIterate
from .sensing import SenseMatrix

__all__ = ["DirectionCatalog", "build_catalog"]


@dataclass(frozen=True)
class DirectionCatalog:
    """Named unit-norm transmit directions (labels like v1_t1, rs1, rc1)."""

    entries: dict

    def __getitem__(self, label: str) -> np.ndarray:
        return self.entries[label]

    def __contains__(self, label: str) -> bool:
        return label in self.entries

    @property
    def labels(self) -> list[str]:
        return list(self.entries)

    def to_json(self) -> dict:
        return {label: complex_to_pairs(v) for label, v in self.entries.items()}

    @classmethod
    def from_json(cls, data: dict) -> "DirectionCatalog":
        return cls(entries={label: pairs_to_complex(v) for label, v in data.items()})


def build_catalog(
    matrices: list[SenseMatrix],
    bcrb_opt: CovarianceIterate,
    rate_opt: CovarianceIterate,
    *,
    require_converged: bool = True,
) -> DirectionCatalog:
    """Assemble the direction catalog from eigen-data.

    v{j}_t{i}: j-th eigenvector of target i's information matrix (two per
    target); rs{j}: leading eigenvectors of the joint-bound-optimal
    covariance, one per target up to the array size; rc1: principal
    eigenvector of the rate-optimal covariance.
    """
    if require_converged and not (bcrb_opt.converged and rate_opt.converged):
        raise RuntimeError("covariance solves did not converge; catalog unavailable")
    entries: dict = {}
    for i, sm in enumerate(matrices):
        if sm.eigenvectors is None:
            raise RuntimeError("sensing matrix is missing eigen-data")
        for j in range(2):
            entries[f"v{j + 1}_t{i + 1}"] = phase_normalize(sm.eigenvectors[:, j])
    m = bcrb_opt.matrix.shape[0]
    for j in range(min(m, len(matrices))):
        entries[f"rs{j + 1}"] = phase_normalize(bcrb_opt.eigenvectors[:, j])
    entries["rc1"] = phase_normalize(rate_opt.eigenvectors[:, 0])
    return DirectionCatalog(entries=entries)
