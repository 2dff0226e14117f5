"""Covariance optimization over the trace-bounded PSD cone.

Both problems are smooth and convex/concave on a tiny feasible set
(transmit arrays here have at most a few dozen elements), so a projected
gradient method with backtracking replaces any external conic solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import eigh_descending, hermitize
from .scenario import ScenarioConfig
from .sensing import SenseMatrix, bcrb_coefficients
from .ula import UlaSpec, steering_matrix

__all__ = [
    "CovarianceIterate",
    "project_psd_trace",
    "minimize_joint_bcrb",
    "maximize_rate_cov",
]

MAX_ITERS = 20_000
TOL_OBJECTIVE = 1e-10
TOL_GRADIENT = 1e-8


@dataclass
class CovarianceIterate:
    """Solver output: feasible covariance plus optimality diagnostics."""

    matrix: np.ndarray
    objective: float
    gradient_norm: float
    iterations: int
    converged: bool
    eigenvalues: np.ndarray = field(default=None)
    eigenvectors: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.eigenvalues is None or self.eigenvectors is None:
            vals, vecs = eigh_descending(self.matrix)
            self.eigenvalues = vals
            self.eigenvectors = vecs

    def diagnostics(self) -> dict:
        return {
            "objective": self.objective,
            "gradient_norm": self.gradient_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": float(np.trace(self.matrix).real),
            "eigenvalues": self.eigenvalues.tolist(),
        }


def _project_eigenvalues(d: np.ndarray, p_max: float) -> np.ndarray:
    """Euclidean projection of a real vector onto {x >= 0, sum x <= p_max}."""
    clipped = np.maximum(d, 0.0)
    total = clipped.sum()
    if total <= p_max:
        return clipped
    # active sum constraint: water-level shift tau with sum max(d - tau, 0) = p_max
    srt = np.sort(d)[::-1]
    csum = np.cumsum(srt)
    k = np.arange(1, len(d) + 1)
    tau_candidates = (csum - p_max) / k
    valid = srt - tau_candidates > 0
    k_star = int(np.max(np.nonzero(valid)[0])) + 1
    tau = tau_candidates[k_star - 1]
    return np.maximum(d - tau, 0.0)


def project_psd_trace(h: np.ndarray, p_max: float) -> np.ndarray:
    """Frobenius projection of a Hermitian matrix onto {R >= 0, Tr R <= p_max}."""
    if not (p_max >= 0):
        raise ValueError("p_max must be >= 0")
    h = hermitize(h, tol=1e-8)
    vals, vecs = np.linalg.eigh(h)
    projected = _project_eigenvalues(vals, p_max)
    return (vecs * projected) @ vecs.conj().T


def _projected_descent(value_grad, x0, p_max, max_iters, tol_obj, tol_grad):
    """Minimize a smooth convex function over the trace-bounded PSD cone.

    Backtracking Armijo line search along the projection arc; the step size
    regrows after each accepted step.  Returns (x, f, pg_norm, iters,
    converged).
    """
    def gradient_mapping_norm(x, g):
        # zero exactly at a constrained stationary point, any probe step
        probe = project_psd_trace(x - g, p_max)
        return float(np.linalg.norm(probe - x))

    x = project_psd_trace(x0, p_max)
    f, g = value_grad(x)
    step = 1.0 / max(np.linalg.norm(g), 1e-12)
    converged = False
    pg_norm = gradient_mapping_norm(x, g)
    it = 0
    for it in range(1, max_iters + 1):
        accepted = False
        for _ in range(60):
            candidate = project_psd_trace(x - step * g, p_max)
            delta = candidate - x
            delta_norm_sq = float(np.vdot(delta, delta).real)
            if delta_norm_sq == 0.0:
                break
            f_new, g_new = value_grad(candidate)
            if f_new <= f - 1e-4 / step * delta_norm_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            pg_norm = gradient_mapping_norm(x, g)
            converged = pg_norm < tol_grad
            break
        rel_decrease = (f - f_new) / max(abs(f), 1e-300)
        x, f, g = candidate, f_new, g_new
        step *= 2.0
        pg_norm = gradient_mapping_norm(x, g)
        if pg_norm < tol_grad or (0.0 <= rel_decrease < tol_obj):
            converged = True
            break
    return x, f, pg_norm, it, converged


def joint_bcrb_objective(
    matrices: list[SenseMatrix], coeffs: np.ndarray, prior_fims: np.ndarray
):
    """Objective/gradient closure for sum_i 1/(c_i Tr[M_i R] + J_i)."""
    ms = [sm.matrix for sm in matrices]

    def value_grad(r):
        f = 0.0
        g = np.zeros_like(r)
        for m, c, j in zip(ms, coeffs, prior_fims):
            den = c * float(np.trace(m @ r).real) + j
            f += 1.0 / den
            g -= (c / den**2) * m
        return f, g

    return value_grad


def minimize_joint_bcrb(
    matrices: list[SenseMatrix],
    prior_fims: np.ndarray,
    scenario: ScenarioConfig,
    *,
    max_iters: int = MAX_ITERS,
    tol_obj: float = TOL_OBJECTIVE,
    tol_grad: float = TOL_GRADIENT,
) -> CovarianceIterate:
    """Minimize the summed per-target bounds over feasible covariances.

    `matrices` and `prior_fims` must follow the order of `scenario.targets`.
    The objective is convex (reciprocals of positive affine maps), so the
    returned iterate is globally optimal up to the stated tolerances.
    """
    if not matrices:
        raise ValueError("need at least one sensing matrix")
    prior_fims = np.asarray(prior_fims, dtype=float)
    if np.any(prior_fims <= 0):
        raise ValueError(
            "all prior Fisher informations must be > 0 (uniform angle priors "
            "make the objective unbounded at zero power)"
        )
    all_coeffs, _ = bcrb_coefficients(scenario)
    coeffs = all_coeffs[: len(matrices)]
    if np.any(coeffs <= 0):
        raise ValueError("information coefficients must be > 0")
    m = matrices[0].matrix.shape[0]
    x0 = (scenario.p_max / m) * np.eye(m, dtype=complex)
    value_grad = joint_bcrb_objective(matrices, coeffs, prior_fims)
    x, f, pg, iters, ok = _projected_descent(
        value_grad, x0, scenario.p_max, max_iters, tol_obj, tol_grad
    )
    return CovarianceIterate(
        matrix=x, objective=f, gradient_norm=pg, iterations=iters, converged=ok
    )


def rate_saa_objective(
    angles: np.ndarray,
    gains: np.ndarray,
    tx: UlaSpec,
    sigma_c_sq: float,
    log_base: float,
):
    """Objective/gradient closure for the sample-average ergodic rate.

    mean_k log(1 + s_k a_k^H K a_k) with s_k = |gain_k|^2 / sigma_c^2.
    """
    a, _ = steering_matrix(tx, np.asarray(angles, dtype=float))
    s = np.abs(np.asarray(gains)) ** 2 / sigma_c_sq
    n = a.shape[1]
    scale = 1.0 / (n * math.log(log_base))

    def value_grad(k):
        q = np.real(np.einsum("ik,ij,jk->k", a.conj(), k, a))
        one_plus = 1.0 + s * q
        f = float(np.sum(np.log(one_plus))) * scale
        w = scale * s / one_plus
        g = (a * w) @ a.conj().T
        return f, 0.5 * (g + g.conj().T)

    return value_grad


def maximize_rate_cov(
    angles: np.ndarray,
    gains: np.ndarray,
    tx: UlaSpec,
    sigma_c_sq: float,
    p_max: float,
    *,
    log_base: float = 2.0,
    max_iters: int = MAX_ITERS,
    tol_obj: float = TOL_OBJECTIVE,
    tol_grad: float = TOL_GRADIENT,
) -> CovarianceIterate:
    """Maximize the sample-average rate over feasible covariances.

    The sample average of the concave per-draw rates is concave, so the
    projected ascent lands at the global optimum of the surrogate.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size < 1_000:
        raise ValueError("need at least 1000 (angle, gain) samples")
    if len(gains) != angles.size:
        raise ValueError("angles and gains must have equal length")
    value_grad_max = rate_saa_objective(angles, gains, tx, sigma_c_sq, log_base)

    def value_grad(k):
        f, g = value_grad_max(k)
        return -f, -g

    m = tx.num_elements
    x0 = (p_max / m) * np.eye(m, dtype=complex)
    x, f, pg, iters, ok = _projected_descent(value_grad, x0, p_max, max_iters, tol_obj, tol_grad)
    return CovarianceIterate(
        matrix=x, objective=-f, gradient_norm=pg, iterations=iters, converged=ok
    )
