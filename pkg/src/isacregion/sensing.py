"""Per-target sensing information matrices and Bayesian CRB evaluation.

For target i the matrix averages, over its angle prior,

    ||b_dot(theta)||^2 a(theta) a(theta)^H + ||b(theta)||^2 a_dot(theta) a_dot(theta)^H,

where a/b are the transmit/receive steering vectors.  The per-target bound
under sample covariance R is 1 / (c_i * Tr[M_i R] + J_i) with
c_i = (2 T / sigma_s^2) E|beta_i|^2 and J_i the prior Fisher information.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .jsonio import complex_to_pairs, pairs_to_complex
from .linalg import eigh_descending, hermitize
from .priors import expectation_nodes, prior_fim, sample_angles
from .scenario import ScenarioConfig, TargetModel
from .ula import UlaSpec, steering_matrix

if TYPE_CHECKING:
    from .strategy import TransmitStrategy

__all__ = [
    "SenseMatrix",
    "compute_mbar",
    "bcrb_coefficients",
    "bcrb_deterministic",
    "bcrb_mixed_mc",
]

# eigenvalues below this fraction of the largest are round-off and clipped
PSD_CLIP_REL = 1e-12


@dataclass(frozen=True)
class SenseMatrix:
    """Hermitian PSD information matrix with its eigendecomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, matching eigenvalue order

    @classmethod
    def from_matrix(cls, h: np.ndarray) -> "SenseMatrix":
        h = hermitize(h, tol=1e-8)
        vals, vecs = eigh_descending(h)
        vals = np.where(vals > PSD_CLIP_REL * max(vals[0], 0.0), vals, 0.0)
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
    def from_json(cls, data: dict) -> "SenseMatrix":
        out = cls(
            matrix=pairs_to_complex(data["matrix"]),
            eigenvalues=np.asarray(data["eigenvalues"], dtype=float),
            eigenvectors=pairs_to_complex(data["eigenvectors"]),
        )
        out.validate()
        return out

    def validate(self) -> None:
        m = self.matrix
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.conj().T).max() > 1e-10 * scale:
            raise ValueError("matrix is not Hermitian")
        if self.eigenvalues.min() < -1e-10 * max(self.lam_max, 1.0):
            raise ValueError("matrix is not PSD")
        gram = self.eigenvectors.conj().T @ self.eigenvectors
        if np.abs(gram - np.eye(gram.shape[0])).max() > 1e-10:
            raise ValueError("eigenvectors are not orthonormal")


def compute_mbar(
    target: TargetModel,
    tx: UlaSpec,
    rx: UlaSpec,
    budget: int,
    *,
    monte_carlo_rng: np.random.Generator | None = None,
) -> SenseMatrix:
    """Average the sensing integrand over the target's angle prior.

    Quadrature by default; pass `monte_carlo_rng` to average over `budget`
    prior draws instead (validation mode).
    """
    if budget < 64:
        raise ValueError("budget must be >= 64")
    if monte_carlo_rng is None:
        theta, weights = expectation_nodes(target.angle_prior, budget)
    else:
        theta = sample_angles(target.angle_prior, budget, monte_carlo_rng)
        weights = np.full(budget, 1.0 / budget)

    a, a_dot = steering_matrix(tx, theta)
    _, b_dot = steering_matrix(rx, theta)
    b_dot_norm_sq = np.sum(np.abs(b_dot) ** 2, axis=0)
    b_norm_sq = float(rx.num_elements)

    m = (a * (weights * b_dot_norm_sq)) @ a.conj().T
    m += b_norm_sq * (a_dot * weights) @ a_dot.conj().T
    return SenseMatrix.from_matrix(m)


def bcrb_coefficients(scenario: ScenarioConfig) -> tuple[np.ndarray, np.ndarray]:
    """(c_i, J_i) per target: information scale factors and prior terms."""
    c = np.array(
        [
            2.0 * scenario.coherence_time * t.gain_prior.second_moment / scenario.sigma_s_sq
            for t in scenario.targets
        ]
    )
    j = np.array([prior_fim(t.angle_prior) for t in scenario.targets])
    return c, j


def _det_quadratic_forms(strategy: "TransmitStrategy", matrices: list[SenseMatrix]) -> np.ndarray:
    """sum_t P_s,t * s_t^H M_i s_t for each target (shape: num targets)."""
    out = np.zeros(len(matrices))
    for i, sm in enumerate(matrices):
        for t in range(strategy.num_slots):
            p = strategy.det_powers[t]
            if p < 0:
                raise ValueError("slot powers must be non-negative")
            if p > 0:
                s = strategy.det_directions[t]
                out[i] += p * float(np.real(s.conj() @ sm.matrix @ s))
    return out


def bcrb_deterministic(
    strategy: "TransmitStrategy",
    matrices: list[SenseMatrix],
    scenario: ScenarioConfig,
) -> np.ndarray:
    """Closed-form per-target bounds for purely deterministic transmission."""
    if np.any(strategy.gauss_powers > 0):
        raise ValueError("strategy has non-zero Gaussian power; use bcrb_mixed_mc")
    if np.any(strategy.det_powers < 0) or np.any(strategy.gauss_powers < 0):
        raise ValueError("slot powers must be non-negative")
    c, j = bcrb_coefficients(scenario)
    # c_i already carries the factor T; the per-slot sum absorbs the 1/T of
    # the sample covariance, leaving (2 E|beta|^2 / sigma^2) * sum_t P_t s^H M s
    forms = _det_quadratic_forms(strategy, matrices)
    info = c / scenario.coherence_time * forms + j
    with np.errstate(divide="ignore"):
        return 1.0 / info


def bcrb_mixed_mc(
    strategy: "TransmitStrategy",
    matrices: list[SenseMatrix],
    scenario: ScenarioConfig,
    rng: np.random.Generator,
    draws: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo per-target bounds for mixed deterministic+Gaussian input.

    Draws the i.i.d. unit Gaussian symbols of the random beam, forms the
    per-draw sample covariance quadratic forms, and averages the reciprocal
    information.  Returns (mean, standard error) per target.
    """
    if draws is None:
        draws = scenario.budgets.gauss_draws
    if draws < 100:
        raise ValueError("draws must be >= 100")
    if np.any(strategy.det_powers < 0) or np.any(strategy.gauss_powers < 0):
        raise ValueError("slot powers must be non-negative")
    if not np.any(strategy.gauss_powers > 0):
        # degenerate Monte Carlo: every draw is the same, variance is zero
        eps = bcrb_deterministic(strategy, matrices, scenario)
        return eps, np.zeros_like(eps)

    n_targets = len(matrices)
    n_slots = strategy.num_slots
    c, j = bcrb_coefficients(scenario)

    # x_t = u_t + G_t v_t with u = sqrt(Ps) s, v = sqrt(Pc) c; then
    # x^H M x = u^H M u + 2 Re(G * u^H M v) + |G|^2 v^H M v.
    const = np.zeros((n_targets, n_slots))
    cross = np.zeros((n_targets, n_slots), dtype=complex)
    quad = np.zeros((n_targets, n_slots))
    for i, sm in enumerate(matrices):
        for t in range(n_slots):
            u = np.sqrt(strategy.det_powers[t]) * strategy.det_directions[t]
            v = np.sqrt(strategy.gauss_powers[t]) * strategy.gauss_directions[t]
            const[i, t] = float(np.real(u.conj() @ sm.matrix @ u))
            cross[i, t] = complex(u.conj() @ sm.matrix @ v)
            quad[i, t] = float(np.real(v.conj() @ sm.matrix @ v))

    g = np.sqrt(0.5) * (
        rng.standard_normal((n_slots, draws)) + 1j * rng.standard_normal((n_slots, draws))
    )
    abs_g_sq = np.abs(g) ** 2

    eps = np.empty(n_targets)
    stderr = np.empty(n_targets)
    inv_t = 1.0 / scenario.coherence_time
    for i in range(n_targets):
        forms = (
            const[i].sum()
            + 2.0 * np.real(cross[i] @ g)
            + quad[i] @ abs_g_sq
        ) * inv_t
        with np.errstate(divide="ignore"):
            samples = 1.0 / (c[i] * forms + j[i])
        eps[i] = samples.mean()
        stderr[i] = samples.std(ddof=1) / np.sqrt(draws)
    return eps, stderr
