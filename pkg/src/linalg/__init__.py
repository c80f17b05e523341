"""Banded LU factorization and clamped solves."""

from src.linalg.banded import (
    PIVOT_TOLERANCE,
    BandedFactorization,
    SingularOperatorError,
    factor,
    residual_norm,
    shifted_apply,
    solve_linear,
)

__all__ = [
    "PIVOT_TOLERANCE",
    "BandedFactorization",
    "SingularOperatorError",
    "factor",
    "residual_norm",
    "shifted_apply",
    "solve_linear",
]
