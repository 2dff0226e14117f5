"""Circular angle priors and complex-gain priors.

Von Mises priors carry the angle uncertainty; gains are zero-mean circularly
symmetric complex Gaussians, so only their second moment matters anywhere in
the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "VonMisesPrior",
    "GainPrior",
    "bessel_i",
    "bessel_i_scaled",
    "prior_fim",
    "kappa_to_std",
    "std_to_kappa",
    "sample_angles",
    "sample_gains",
    "vonmises_pdf",
    "expectation_nodes",
]

# Below this argument the power series converges in well under 120 terms with
# no cancellation; above it the scaled asymptotic expansion is accurate to a
# few ulp (its truncation error behaves like exp(-2x)).
_SERIES_ASYMPTOTIC_CROSSOVER = 30.0


@dataclass(frozen=True)
class VonMisesPrior:
    """Circular prior with mean direction (radians) and concentration kappa.

    kappa = 0 is the uniform prior on the circle.
    """

    mean_direction: float
    kappa: float

    def __post_init__(self):
        if not np.isfinite(self.mean_direction):
            raise ValueError("mean_direction must be finite")
        if not (self.kappa >= 0):
            raise ValueError("kappa must be >= 0")


@dataclass(frozen=True)
class GainPrior:
    """Zero-mean circularly symmetric complex gain; stores E|gain|^2."""

    second_moment: float

    def __post_init__(self):
        if not (self.second_moment > 0):
            raise ValueError("second_moment must be > 0")


def _bessel_series_scaled(order: int, x: float) -> float:
    # exp(-x) * sum_k (x/2)^(2k+order) / (k! (k+order)!); all terms positive.
    half = 0.5 * x
    term = 1.0
    for k in range(1, order + 1):
        term *= half / k
    total = term
    k = 1
    while k < 500:
        term *= half * half / (k * (k + order))
        total += term
        if term < 1e-18 * total:
            break
        k += 1
    return total * math.exp(-x)


def _bessel_asymptotic_scaled(order: int, x: float) -> float:
    # exp(-x) * I_n(x) ~ (2 pi x)^(-1/2) * sum_k (-1)^k a_k(n) / x^k
    mu = 4.0 * order * order
    term = 1.0
    total = term
    k = 1
    while k < 200:
        factor = -(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        new_term = term * factor
        if abs(new_term) >= abs(term):
            break  # asymptotic series started diverging; stop at smallest term
        term = new_term
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        k += 1
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_i_scaled(order: int, x: float) -> float:
    """exp(-x) * I_order(x), stable for arbitrarily large x."""
    if order < 0 or int(order) != order:
        raise ValueError("order must be a non-negative integer")
    if not (x >= 0):
        raise ValueError("x must be >= 0")
    if x < _SERIES_ASYMPTOTIC_CROSSOVER:
        return _bessel_series_scaled(int(order), float(x))
    return _bessel_asymptotic_scaled(int(order), float(x))


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind, I_order(x).

    Power series below x = 30, scaled asymptotic expansion above; both
    branches are accurate to better than 1e-12 relative.  Overflows to inf
    for x beyond ~709 (use `bessel_i_scaled` there).
    """
    scaled = bessel_i_scaled(order, x)
    if x > 700.0:
        with np.errstate(over="ignore"):
            return float(scaled * np.exp(x))
    return scaled * math.exp(x)


def prior_fim(prior: VonMisesPrior) -> float:
    """Fisher information the prior carries about its angle.

    Equals kappa^2/2 * (1 - I2(kappa)/I0(kappa)); zero for the uniform
    prior, approaches kappa in the high-concentration (Gaussian) limit.
    """
    kappa = prior.kappa
    if kappa == 0.0:
        return 0.0
    ratio = bessel_i_scaled(2, kappa) / bessel_i_scaled(0, kappa)
    return 0.5 * kappa * kappa * (1.0 - ratio)


def kappa_to_std(kappa: float) -> float:
    """Small-variance conversion: angle standard deviation ~ 1/sqrt(kappa)."""
    if not (kappa > 0):
        raise ValueError("kappa must be > 0")
    return 1.0 / math.sqrt(kappa)


def std_to_kappa(std: float) -> float:
    """Inverse of `kappa_to_std`; exact round trip."""
    if not (std > 0):
        raise ValueError("std must be > 0")
    return 1.0 / (std * std)


def sample_angles(prior: VonMisesPrior, count: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. draws from the prior; values in [-pi, pi] (circularly wrapped)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if prior.kappa == 0.0:
        return rng.uniform(-np.pi, np.pi, size=count)
    return rng.vonmises(prior.mean_direction, prior.kappa, size=count)


def sample_gains(prior: GainPrior, count: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. zero-mean circularly symmetric complex draws with E|g|^2 set."""
    if count < 1:
        raise ValueError("count must be >= 1")
    scale = math.sqrt(prior.second_moment / 2.0)
    return scale * (rng.standard_normal(count) + 1j * rng.standard_normal(count))


def vonmises_pdf(theta: np.ndarray, prior: VonMisesPrior) -> np.ndarray:
    """Density of the prior, evaluated stably even for huge kappa."""
    theta = np.asarray(theta, dtype=float)
    kappa = prior.kappa
    if kappa == 0.0:
        return np.full(theta.shape, 1.0 / (2.0 * np.pi))
    # exp(kappa (cos u - 1)) / (2 pi exp(-kappa) I0(kappa)) avoids overflow
    log_num = kappa * (np.cos(theta - prior.mean_direction) - 1.0)
    return np.exp(log_num) / (2.0 * np.pi * bessel_i_scaled(0, kappa))


def expectation_nodes(prior: VonMisesPrior, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Angles and normalized weights for expectations under the prior.

    Diffuse priors (kappa < 1) use the periodic trapezoid rule over one full
    period; concentrated ones use Gauss-Legendre on a window just wide enough
    that the density at the edge has dropped by exp(-40), clamped to one
    period.  Weights sum to one, so expectations of constants are exact.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    mu, kappa = prior.mean_direction, prior.kappa
    if kappa < 1.0:
        theta = mu - np.pi + (2.0 * np.pi) * (np.arange(count) + 0.5) / count
        weights = vonmises_pdf(theta, prior)
    else:
        half_width = np.pi if kappa <= 20.0 else math.acos(1.0 - 40.0 / kappa)
        nodes, gl_weights = np.polynomial.legendre.leggauss(count)
        theta = mu + half_width * nodes
        weights = gl_weights * vonmises_pdf(theta, prior)
    weights = weights / weights.sum()
    return theta, weights
