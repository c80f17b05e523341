"""Testing helpers shared by unit, contract and integration tests."""

from __future__ import annotations

from typing import Callable, Dict

import numpy as np
from scipy import linalg

from src.discretization.models import DiscreteBiharmonic, RadialMesh


def random_nonnegative_rhs(mesh: RadialMesh, rng: np.random.Generator, *, degree: int = 4) -> np.ndarray:
    """Square of a random polynomial in r plus a random nonnegative constant.

    The constraint entry is left at 0.
    """
    coefficients = rng.normal(size=degree + 1)
    values = np.polynomial.polynomial.polyval(mesh.nodes, coefficients) ** 2 + rng.uniform(0.0, 0.1)
    values[-1] = 0.0
    return values


def reduced_matrix(op: DiscreteBiharmonic) -> np.ndarray:
    """Dense op restricted to rows and columns 0..M-1 (u_M = 0 eliminated)."""
    return op.matrix[: op.M, : op.M].toarray()


def dense_generalized_eigenvalues(op: DiscreteBiharmonic, weight: np.ndarray) -> np.ndarray:
    """Real eigenvalues of A phi = value diag(weight) phi on the clamped space, ascending."""
    values = linalg.eig(reduced_matrix(op), np.diag(weight[: op.M]), right=False)
    return np.sort(values.real[np.abs(values.imag) <= 1e-8 * np.abs(values.real).max()])


def sample_profiles() -> Dict[str, Callable[[np.ndarray], np.ndarray]]:
    """Profiles with known clamped biharmonic images.

    * bump: (1 - r^2)^2, image 8n(n+2).
    * quartic: r^4, image 8n(n+2); not clamped, so only rows 0..M-2 reproduce it.
    * cubic_bump: (1 - r^2)^3, image 24n(n+2) - 24(n+2)(n+4) r^2.
    """
    return {
        "bump": lambda r: (1.0 - r**2) ** 2,
        "quartic": lambda r: r**4,
        "cubic_bump": lambda r: (1.0 - r**2) ** 3,
    }


def exact_bilaplacian(name: str, n: int, r: np.ndarray) -> np.ndarray:
    """Closed-form radial biharmonic of the sample profiles."""
    if name == "bump":
        return np.full_like(r, 8.0 * n * (n + 2.0))
    if name == "quartic":
        return np.full_like(r, 8.0 * n * (n + 2.0))
    if name == "cubic_bump":
        return 24.0 * n * (n + 2.0) - 24.0 * (n + 2.0) * (n + 4.0) * r**2
    raise KeyError(name)
