"""Ergodic rate under statistical CSI and the matched capacity ceiling.

The receiver knows its channel; the transmitter only knows the angle prior
and the gain second moment, so the rate is an expectation over both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .jsonio import complex_to_pairs, pairs_to_complex
from .linalg import eigh_descending, hermitize
from .priors import GainPrior, VonMisesPrior, expectation_nodes, sample_angles, sample_gains
from .ula import UlaSpec, steering_matrix

if TYPE_CHECKING:
    from .strategy import TransmitStrategy

__all__ = ["LbarMatrix", "compute_lbar", "ergodic_rate_mc", "capacity_upper"]


@dataclass(frozen=True)
class LbarMatrix:
    """Prior-averaged outer product of the transmit steering vector.

    Trace equals the transmit element count for any prior, since the
    steering vectors have constant squared norm.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, h: np.ndarray) -> "LbarMatrix":
        h = hermitize(h, tol=1e-8)
        vals, vecs = eigh_descending(h)
        vals = np.where(vals > 1e-12 * max(vals[0], 0.0), vals, 0.0)
        return cls(matrix=h, eigenvalues=vals, eigenvectors=vecs)

    @property
    def lam_max(self) -> float:
        return float(self.eigenvalues[0])

    def to_json(self) -> dict:
        return {
            "matrix": complex_to_pairs(self.matrix),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": complex_to_pairs(self.eigenvectors),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LbarMatrix":
        out = cls(
            matrix=pairs_to_complex(data["matrix"]),
            eigenvalues=np.asarray(data["eigenvalues"], dtype=float),
            eigenvectors=pairs_to_complex(data["eigenvectors"]),
        )
        out.validate()
        return out

    def validate(self) -> None:
        m = self.matrix
        n = m.shape[0]
        if np.abs(m - m.conj().T).max() > 1e-10 * max(np.abs(m).max(), 1.0):
            raise ValueError("matrix is not Hermitian")
        trace = float(np.trace(m).real)
        if abs(trace - n) > 1e-8 * n:
            raise ValueError(f"trace {trace} deviates from element count {n}")


def compute_lbar(comm_prior: VonMisesPrior, tx: UlaSpec, budget: int) -> LbarMatrix:
    """Average a(theta) a(theta)^H over the communication angle prior."""
    if budget < 64:
        raise ValueError("budget must be >= 64")
    theta, weights = expectation_nodes(comm_prior, budget)
    a, _ = steering_matrix(tx, theta)
    return LbarMatrix.from_matrix((a * weights) @ a.conj().T)


def ergodic_rate_mc(
    strategy: "TransmitStrategy",
    comm_prior: VonMisesPrior,
    gain: GainPrior,
    sigma_c_sq: float,
    rng: np.random.Generator,
    draws: int = 1_000,
    log_base: float = 2.0,
) -> tuple[float, float]:
    """Monte Carlo ergodic rate of the strategy's random beams.

    Each sample redraws (angle, gain) jointly and accumulates the per-slot
    log terms; returns (rate, standard error) in log-`log_base` units per
    channel use.  Zero Gaussian power short-circuits to an exact zero.
    """
    active = [t for t in range(strategy.num_slots) if strategy.gauss_powers[t] > 0]
    if not active:
        return 0.0, 0.0
    if draws < 2:
        raise ValueError("draws must be >= 2")
    for t in active:
        nrm = np.linalg.norm(strategy.gauss_directions[t])
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError("Gaussian beam directions must be unit-norm")

    theta = sample_angles(comm_prior, draws, rng)
    alpha = sample_gains(gain, draws, rng)
    snr = np.abs(alpha) ** 2 / sigma_c_sq

    a, _ = steering_matrix(strategy.tx_spec, theta)
    totals = np.zeros(draws)
    for t in active:
        gains_t = np.abs(strategy.gauss_directions[t].conj() @ a) ** 2
        totals += np.log1p(strategy.gauss_powers[t] * snr * gains_t)
    totals /= strategy.num_slots * math.log(log_base)
    return float(totals.mean()), float(totals.std(ddof=1) / np.sqrt(draws))


def capacity_upper(
    lbar: LbarMatrix,
    gain: GainPrior,
    sigma_c_sq: float,
    p_max: float,
    log_base: float = 2.0,
) -> float:
    """Rate ceiling from pushing the expectations inside the logarithm.

    log(1 + (E|gain|^2 / sigma_c^2) * p_max * lam_max); attained covariance
    is full power on the principal eigenvector, but the bound itself is not
    tight for the ergodic rate.
    """
    snr = gain.second_moment / sigma_c_sq
    return math.log1p(snr * p_max * lbar.lam_max) / math.log(log_base)
