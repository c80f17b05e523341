"""Data carriers for the radial discretization.

RadialMesh and RadialField are thin numpy wrappers; DiscreteBiharmonic holds the
assembled sparse operator together with the Laplacian it is composed from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse


class ShapeError(ValueError):
    """Raised when a field does not match the mesh it is combined with."""


# ============================================================================
# Mesh and fields
# ============================================================================


@dataclass(frozen=True, eq=False)
class RadialMesh:
    """Uniform mesh r_0 = 0 < r_1 < ... < r_M = 1.

    Attributes:
        nodes: Node radii, length M + 1.
        h: Uniform spacing 1/M.
    """

    nodes: np.ndarray
    h: float

    @property
    def M(self) -> int:
        return len(self.nodes) - 1

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class RadialField:
    """Values of a radial function at the mesh nodes."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ShapeError(f"RadialField expects a 1-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("RadialField entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def interior(self) -> np.ndarray:
        """Values at the nodes with r < 1."""
        return self.values[:-1]

    def sup(self) -> float:
        return float(np.max(self.interior))


FieldLike = Union[RadialField, np.ndarray]


def field_values(field: FieldLike, size: int | None = None) -> np.ndarray:
    """Return a float array for a field or array, checking its length."""
    values = field.values if isinstance(field, RadialField) else np.asarray(field, dtype=float)
    if values.ndim != 1:
        raise ShapeError(f"Expected a 1-D field, got shape {values.shape}")
    if size is not None and len(values) != size:
        raise ShapeError(f"Field length {len(values)} does not match mesh size {size}")
    return values


# ============================================================================
# Operator
# ============================================================================


@dataclass(frozen=True, eq=False)
class DiscreteBiharmonic:
    """Clamped radial biharmonic on a uniform mesh.

    Rows 0..M-1 are the product of the interior rows of ``laplacian`` with the
    full ``laplacian``; row M is ``boundary_scale * u_M`` and enforces u(1) = 0.
    The ghost node beyond r = 1 is eliminated inside row M of ``laplacian``,
    which carries u'(1) = 0.

    Attributes:
        mesh: Mesh the operator was assembled on.
        n: Spatial dimension.
        matrix: Assembled (M+1) x (M+1) CSR matrix.
        laplacian: (M+1) x (M+1) CSR radial Laplacian with center and ghost closures.
        boundary_scale: Diagonal entry of the constraint row, 1/h^4.
        lower: Lower bandwidth of ``matrix``.
        upper: Upper bandwidth of ``matrix``.
    """

    mesh: RadialMesh
    n: int
    matrix: sparse.csr_matrix
    laplacian: sparse.csr_matrix
    boundary_scale: float
    lower: int
    upper: int

    @property
    def size(self) -> int:
        return self.mesh.size

    @property
    def M(self) -> int:
        return self.mesh.M

    def band_storage(self) -> np.ndarray:
        """LAPACK-style band array ab with ab[upper + i - j, j] = A[i, j]."""
        size = self.size
        ab = np.zeros((self.lower + self.upper + 1, size))
        for offset in range(-self.lower, self.upper + 1):
            diagonal = self.matrix.diagonal(offset)
            start = max(offset, 0)
            ab[self.upper - offset, start : start + len(diagonal)] = diagonal
        return ab
