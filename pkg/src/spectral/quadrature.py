"""Integrals over the unit n-ball for radial fields.

Trapezoidal weights of r^(n-1) on the mesh, scaled by the area of the unit
sphere, so that sum(weights) approximates |B| = pi^(n/2) / Gamma(n/2 + 1).
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma

from src.discretization.models import FieldLike, RadialMesh, field_values


def sphere_area(n: int) -> float:
    """|S^(n-1)| = 2 pi^(n/2) / Gamma(n/2); equals 2 for n = 1."""
    return float(2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0))


def ball_volume(n: int) -> float:
    return float(np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


def radial_weights(mesh: RadialMesh, n: int) -> np.ndarray:
    weights = mesh.h * mesh.nodes ** (n - 1)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return sphere_area(n) * weights


def integrate(weights: np.ndarray, f: FieldLike) -> float:
    return float(np.dot(weights, field_values(f, len(weights))))


def inner(weights: np.ndarray, a: FieldLike, b: FieldLike) -> float:
    size = len(weights)
    return float(np.dot(weights, field_values(a, size) * field_values(b, size)))


def norm(weights: np.ndarray, a: FieldLike) -> float:
    return float(np.sqrt(inner(weights, a, a)))
