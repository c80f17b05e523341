"""Eigenpair carrier and spectral error types."""

from __future__ import annotations

from dataclasses import dataclass

from src.discretization.models import RadialField


class ConvergenceError(Exception):
    """Inverse iteration did not reach the residual tolerance within the cap."""

    def __init__(self, message: str, *, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SingularWeightError(ValueError):
    """The stability weight is infinite because u touches 1."""


class CertificateDomainError(SingularWeightError):
    """A certificate weight is nonpositive or infinite at an included node."""


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Ground state of a (shifted, weighted) clamped eigenproblem.

    Attributes:
        value: Eigenvalue.
        field: Eigenfunction with unit norm in the radial measure, positive mean.
        iterations: Inverse iterations used.
        residual: ||phi - (value - shift) y||_inf / ||phi||_inf for y the shifted solve of W phi.
        shift: Spectral shift the iteration was run with.
    """

    value: float
    field: RadialField
    iterations: int
    residual: float
    shift: float = 0.0
