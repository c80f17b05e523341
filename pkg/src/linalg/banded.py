"""LU factorization and solves for the clamped discrete biharmonic.

Factorizations use SuperLU with the natural column order, which keeps the fill
inside the band of the pentadiagonal operator. Pivots are read off the diagonal
of U and a relative pivot below 1e-14 is reported as a singular operator. Rounding
in the computed eigenvalue keeps the smallest pivot of a fold-shifted Jacobian near
1e-12, so callers that want to see the fold pass a looser pivot_tolerance.

Exports:
    - SingularOperatorError: Raised for numerically singular matrices
    - BandedFactorization: Immutable factorization with pivot record
    - factor: Factor op - diag(shift)
    - solve_linear: Solve the clamped system for one right-hand side
    - shifted_apply: Apply op - diag(shift) without factoring
    - residual_norm: Max-norm residual over the non-constraint rows
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from src.common.logging import get_logger
from src.discretization.models import DiscreteBiharmonic, FieldLike, RadialField, field_values
from src.discretization.operator import apply

logger = get_logger(__name__)

PIVOT_TOLERANCE = 1e-14


class SingularOperatorError(Exception):
    """Raised when the (shifted) operator is numerically singular."""

    def __init__(self, message: str, *, pivot_ratio: float):
        super().__init__(message)
        self.pivot_ratio = pivot_ratio


@dataclass(frozen=True, eq=False)
class BandedFactorization:
    """LU factors of op - diag(shift).

    Attributes:
        op: Operator that was factored.
        shift: Diagonal subtracted from rows 0..M-1 (zeros when unshifted).
        lu: SuperLU object; safe for concurrent solves.
        pivots: Absolute values of the diagonal of U.
        pivot_ratio: min(pivots) / max(pivots).
        lower: Lower bandwidth of the original operator.
        upper: Upper bandwidth of the original operator.
    """

    op: DiscreteBiharmonic
    shift: np.ndarray
    lu: spla.SuperLU
    pivots: np.ndarray
    pivot_ratio: float
    lower: int
    upper: int

    @property
    def size(self) -> int:
        return self.op.size


def _shift_vector(op: DiscreteBiharmonic, diagonal_shift: Optional[FieldLike]) -> np.ndarray:
    shift = np.zeros(op.size)
    if diagonal_shift is not None:
        values = field_values(diagonal_shift, op.size)
        if not np.all(np.isfinite(values[:-1])):
            raise ValueError("Diagonal shift must be finite at nodes r < 1")
        shift[:-1] = values[:-1]
    return shift


def factor(
    op: DiscreteBiharmonic,
    diagonal_shift: Optional[FieldLike] = None,
    *,
    pivot_tolerance: float = PIVOT_TOLERANCE,
) -> BandedFactorization:
    """Factor op - diag(diagonal_shift); the constraint row is never shifted.

    Raises:
        ShapeError: If the shift length differs from M + 1.
        SingularOperatorError: If a pivot falls below pivot_tolerance (default 1e-14)
            x the largest pivot.
    """
    shift = _shift_vector(op, diagonal_shift)
    matrix = op.matrix
    if np.any(shift):
        matrix = matrix - sparse.diags(shift, format="csr")
    try:
        lu = spla.splu(matrix.tocsc(), permc_spec="NATURAL")
    except RuntimeError as exc:
        raise SingularOperatorError(f"Operator is exactly singular: {exc}", pivot_ratio=0.0) from exc

    pivots = np.abs(lu.U.diagonal())
    largest = float(pivots.max())
    ratio = float(pivots.min() / largest) if largest > 0 else 0.0
    if not np.isfinite(ratio) or ratio < pivot_tolerance:
        logger.debug(
            "factor_singular",
            extra={"event": "factor_singular", "pivot_ratio": ratio, "M": op.M, "n": op.n},
        )
        raise SingularOperatorError(
            f"Operator is numerically singular (pivot ratio {ratio:.3e} < {pivot_tolerance:.0e})",
            pivot_ratio=ratio,
        )
    shift.setflags(write=False)
    return BandedFactorization(
        op=op,
        shift=shift,
        lu=lu,
        pivots=pivots,
        pivot_ratio=ratio,
        lower=op.lower,
        upper=op.upper,
    )


def solve_linear(fact: BandedFactorization, rhs: FieldLike) -> RadialField:
    """Solve the clamped system; rhs[M] is the boundary datum and is taken as 0."""
    b = np.array(field_values(rhs, fact.size), dtype=float)
    b[-1] = 0.0
    x = fact.lu.solve(b)
    x[-1] = 0.0
    return RadialField(x)


def shifted_apply(fact: BandedFactorization, x: FieldLike) -> RadialField:
    """(op - diag(shift)) x with the same row convention as apply."""
    values = field_values(x, fact.size)
    return RadialField(apply(fact.op, values).values - fact.shift * values)


def residual_norm(fact: BandedFactorization, x: FieldLike, rhs: FieldLike) -> float:
    """max_i |((op - diag(shift)) x - rhs)_i| over rows 0..M-1."""
    lhs = shifted_apply(fact, x).values
    b = field_values(rhs, fact.size)
    return float(np.max(np.abs(lhs[:-1] - b[:-1])))
