"""Assembly and application of the clamped radial biharmonic.

The operator is the composition of two second-order radial Laplacians
L = D2 + (n - 1)/r D1. Composing the centered Laplacian with itself yields the
pentadiagonal centered stencil of

    u'''' + 2(n-1)/r u''' + (n-1)(n-3)/r^2 u'' - (n-1)(n-3)/r^3 u'

at interior rows, while the closures live in the Laplacian:

* r = 0: the three-point even closure [a (u1 - u0) + b (u2 - u0)] / h^2 with
  a = (4n + 2)/3 and b = (n - 1)/6, exact on 1 and r^2 and consistent with the
  discrete image of r^4, which realizes u'(0) = u'''(0) = 0.
* r = 1: the ghost value u_{M+1} is eliminated with the six-point one-sided
  formula for u'(1) = 0, exact for quintics.

Row M of the assembled matrix is 1/h^4 * u_M (the u(1) = 0 constraint).
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from src.common.config import ConfigError
from src.discretization.models import DiscreteBiharmonic, FieldLike, RadialField, RadialMesh, field_values

# Ghost u_{M+1} in terms of u_M, u_{M-1}, ..., u_{M-4} under u'(1) = 0.
GHOST_WEIGHTS = np.array([-65.0 / 12.0, 10.0, -5.0, 5.0 / 3.0, -0.25])

ROUNDING_FACTOR = 64.0


def center_closure(n: int) -> tuple[float, float]:
    """Weights (a, b) of the r = 0 Laplacian row."""
    return (4.0 * n + 2.0) / 3.0, (n - 1.0) / 6.0


def radial_laplacian(mesh: RadialMesh, n: int) -> sparse.csr_matrix:
    """Radial Laplacian with the center closure and the clamped ghost row."""
    M = mesh.M
    inv_h2 = 1.0 / mesh.h**2
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    a, b = center_closure(n)
    rows.append(np.zeros(3, dtype=int))
    cols.append(np.arange(3))
    vals.append(np.array([-(a + b), a, b]) * inv_h2)

    # (n - 1)/(2 h r_j) = (n - 1)/(2 j h^2)
    j = np.arange(1, M)
    q = (n - 1.0) / (2.0 * j)
    for offset, coeff in ((-1, 1.0 - q), (0, -2.0 * np.ones_like(q)), (1, 1.0 + q)):
        rows.append(j)
        cols.append(j + offset)
        vals.append(coeff * inv_h2)

    q_M = (n - 1.0) / (2.0 * M)
    boundary = (1.0 + q_M) * GHOST_WEIGHTS
    boundary[0] += -2.0
    boundary[1] += 1.0 - q_M
    rows.append(np.full(5, M))
    cols.append(M - np.arange(5))
    vals.append(boundary * inv_h2)

    matrix = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(M + 1, M + 1),
    ).tocsr()
    matrix.eliminate_zeros()
    return matrix


def _bandwidths(matrix: sparse.csr_matrix) -> tuple[int, int]:
    coo = matrix.tocoo()
    offsets = coo.col - coo.row
    return int(max(0, -offsets.min())), int(max(0, offsets.max()))


def assemble_biharmonic(mesh: RadialMesh, n: int) -> DiscreteBiharmonic:
    """Assemble the clamped radial biharmonic for dimension n.

    Raises:
        ConfigError: If n is not an integer >= 1.
    """
    if int(n) != n or n < 1:
        raise ConfigError(f"Dimension n must be an integer >= 1, got {n}")
    n = int(n)
    M = mesh.M
    laplacian = radial_laplacian(mesh, n)
    boundary_scale = 1.0 / mesh.h**4
    constraint = sparse.csr_matrix(([boundary_scale], ([0], [M])), shape=(1, M + 1))
    matrix = sparse.vstack([laplacian[:M] @ laplacian, constraint], format="csr")
    matrix.eliminate_zeros()
    lower, upper = _bandwidths(matrix)
    return DiscreteBiharmonic(
        mesh=mesh,
        n=n,
        matrix=matrix,
        laplacian=laplacian,
        boundary_scale=boundary_scale,
        lower=lower,
        upper=upper,
    )


def apply(op: DiscreteBiharmonic, f: FieldLike) -> RadialField:
    """Apply the operator; row M returns the constraint residual u_M / h^4.

    The two Laplacians are applied in sequence, which rounds better than the
    assembled matrix.

    Raises:
        ShapeError: If the field length differs from M + 1.
    """
    values = field_values(f, op.size)
    inner = op.laplacian @ values
    out = np.empty_like(values)
    out[:-1] = op.laplacian[:-1] @ inner
    out[-1] = op.boundary_scale * values[-1]
    return RadialField(out)


def rounding_bound(op: DiscreteBiharmonic, f: FieldLike) -> np.ndarray:
    """Per-row floating-point bound 64 eps |L|(|L||f|) for evaluating apply(op, f)."""
    values = np.abs(field_values(f, op.size))
    magnitude = abs(op.laplacian)
    bound = np.empty_like(values)
    bound[:-1] = magnitude[:-1] @ (magnitude @ values)
    bound[-1] = op.boundary_scale * values[-1]
    return ROUNDING_FACTOR * np.finfo(float).eps * bound
