"""Uniform linear array geometry, steering vectors and angle derivatives.

The element phase reference sits at the array centroid, so for every angle
the steering vector and its derivative are orthogonal.  Downstream
information-matrix algebra relies on that orthogonality, which is why the
centered indexing is not configurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["UlaSpec", "SteeringPair", "steering", "steering_matrix"]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class UlaSpec:
    """Uniform linear array: element count and spacing in wavelengths."""

    num_elements: int
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError("num_elements must be a positive integer")
        if not (self.spacing > 0):
            raise ValueError("spacing must be > 0")

    @property
    def element_offsets(self) -> np.ndarray:
        """Element positions relative to the array centroid (in elements)."""
        return np.arange(self.num_elements, dtype=float) - (self.num_elements - 1) / 2.0


@dataclass(frozen=True)
class SteeringPair:
    """Steering vector `a` and its exact angle derivative `a_dot`."""

    a: np.ndarray
    a_dot: np.ndarray


def steering(spec: UlaSpec, theta: float) -> SteeringPair:
    """Steering vector of `spec` at angle `theta` (radians), with derivative.

    Element m carries phase 2*pi*spacing*(m - (M-1)/2)*cos(theta).  The
    centered offsets guarantee <a, a_dot> = 0 for every angle.
    """
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    offsets = spec.element_offsets
    phase = TWO_PI * spec.spacing * offsets * np.cos(theta)
    a = np.exp(1j * phase)
    a_dot = (-1j * TWO_PI * spec.spacing * np.sin(theta)) * offsets * a
    return SteeringPair(a=a, a_dot=a_dot)


def steering_matrix(spec: UlaSpec, thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized `steering`: columns are a(theta_k) and a_dot(theta_k).

    Returns (A, A_dot), each of shape (num_elements, len(thetas)).
    """
    thetas = np.asarray(thetas, dtype=float)
    if not np.all(np.isfinite(thetas)):
        raise ValueError("all angles must be finite")
    offsets = spec.element_offsets[:, None]
    cos_t = np.cos(thetas)[None, :]
    sin_t = np.sin(thetas)[None, :]
    a = np.exp(1j * TWO_PI * spec.spacing * offsets * cos_t)
    a_dot = (-1j * TWO_PI * spec.spacing) * offsets * sin_t * a
    return a, a_dot
