"""Computable outer bound: per-target error floors and the rate ceiling.

The floor for target i is 1/(c_i p_max lam_max[M_i] + J_i); it is attained
by spending the whole budget on the matrix's principal eigenvector in every
slot, so the sensing corner of the rectangle bound is tight per target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .comm import LbarMatrix, capacity_upper
from .priors import GainPrior
from .scenario import ScenarioConfig
from .sensing import SenseMatrix, bcrb_coefficients

__all__ = ["TargetFloor", "OuterBound", "eps_min_prime", "outer_region"]


@dataclass(frozen=True)
class TargetFloor:
    """Minimum achievable bound for one target, with the attaining input."""

    eps_min: float
    direction: np.ndarray
    description: str


@dataclass(frozen=True)
class OuterBound:
    per_target: tuple[TargetFloor, ...]
    eps_floor: float
    rate_ceiling: float


def eps_min_prime(
    matrix: SenseMatrix,
    gain: GainPrior,
    prior_fim_value: float,
    scenario: ScenarioConfig,
    p_max: float | None = None,
) -> TargetFloor:
    """Per-target floor and the rank-1 full-power input that attains it."""
    if p_max is None:
        p_max = scenario.p_max
    c = 2.0 * scenario.coherence_time * gain.second_moment / scenario.sigma_s_sq
    info = c * p_max * matrix.lam_max + prior_fim_value
    direction = matrix.eigenvectors[:, 0]
    return TargetFloor(
        eps_min=1.0 / info,
        direction=direction,
        description=(
            "sqrt(p_max) times the principal eigenvector of the sensing "
            "matrix, repeated over all slots"
        ),
    )


def outer_region(
    scenario: ScenarioConfig,
    matrices: list[SenseMatrix],
    lbar: LbarMatrix,
) -> OuterBound:
    """Rectangle bound: summed per-target floors and the rate ceiling."""
    _, prior_fims = bcrb_coefficients(scenario)
    floors = tuple(
        eps_min_prime(sm, t.gain_prior, j, scenario)
        for sm, t, j in zip(matrices, scenario.targets, prior_fims)
    )
    ceiling = capacity_upper(
        lbar,
        scenario.comm_gain,
        scenario.sigma_c_sq,
        scenario.p_max,
        log_base=scenario.rate_log_base,
    )
    return OuterBound(
        per_target=floors,
        eps_floor=float(np.sum([f.eps_min for f in floors])),
        rate_ceiling=ceiling,
    )
