"""Branch data carriers, solver signals and serialized branch reports.

Numerical carriers (BranchPoint, ContinuationResult) are dataclasses holding
numpy-backed fields. Reports written by the command-line front-end are pydantic
models so they serialize with ``model_dump(mode="json")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.common.config import ProblemConfig
from src.discretization.models import DiscreteBiharmonic, RadialField


# ============================================================================
# Solver signals
# ============================================================================


class BranchSolveError(Exception):
    """Base class for nonlinear solve failures at a fixed lambda."""

    def __init__(self, message: str, *, lam: float, iterations: int, reason: str):
        super().__init__(message)
        self.lam = lam
        self.iterations = iterations
        self.reason = reason


class NoConvergenceError(BranchSolveError):
    """Iterates blew up, stalled or hit the iteration cap (evidence that lambda >= lambda*)."""


class FoldDetectedError(BranchSolveError):
    """The Newton Jacobian became singular."""


# ============================================================================
# Enums
# ============================================================================


class SolveMethod(str, Enum):
    MONOTONE = "monotone"
    NEWTON = "newton"


class RegularityVerdict(str, Enum):
    REGULAR_CONSISTENT = "regular-consistent"
    SINGULAR_SUSPECT = "singular-suspect"


class BranchTermination(str, Enum):
    """Why continuation stopped.

    fold: the last point had mu1 <= 0.05 nu1, so the linearization was degenerating.
    ceiling: mu1 was still large and the iterates ran into the sup u limits.
    """

    FOLD = "fold"
    CEILING = "ceiling"


# ============================================================================
# Numerical carriers
# ============================================================================


@dataclass(frozen=True, eq=False)
class BranchPoint:
    """One converged solution of the clamped problem at parameter lam.

    Attributes:
        lam: Parameter lambda.
        u: Solution field (0 <= u < 1 at r < 1).
        mu1: Smallest eigenvalue of the linearization at u.
        sup_norm: max of u over nodes r < 1.
        residual: Solution-space residual ||op^-1 (op u - lam f(u))||_inf.
        method: Solver that produced the point.
        iterations: Iterations used by that solver.
    """

    lam: float
    u: RadialField
    mu1: float
    sup_norm: float
    residual: float
    method: SolveMethod
    iterations: int


@dataclass(frozen=True, eq=False)
class ContinuationResult:
    """Minimal branch from lambda = 0 up to the bracketed fold.

    Attributes:
        config: Run parameters.
        op: Operator the branch was traced on.
        points: Converged points with strictly increasing lam.
        lambda_lo: Largest lambda with a converged minimal solution.
        lambda_hi: Smallest lambda shown infeasible.
        u_star: Extrapolated extremal solution.
        u_star_sup: max of u_star over nodes r < 1.
        regular_verdict: u_star_sup <= 1 - 10 h on this mesh.
        nu1: First clamped eigenvalue on the same mesh.
        fold_signal_lambda: lambda where the Jacobian becomes singular, extrapolated
            from mu1 of the last two points; None for a ceiling stop.
        extrapolation_pair: Parameters of the two points used for u_star.
        termination: Whether the run stopped at a fold or at the sup u ceiling.
        u_star_mu1: mu1 of the linearization at (u_star, lambda_hi).
        extrapolation_weight: Fraction of the sqrt extrapolation kept in u_star.
    """

    config: ProblemConfig
    op: DiscreteBiharmonic
    points: List[BranchPoint]
    lambda_lo: float
    lambda_hi: float
    u_star: RadialField
    u_star_sup: float
    regular_verdict: bool
    nu1: float
    fold_signal_lambda: Optional[float] = None
    extrapolation_pair: Tuple[float, float] = field(default=(0.0, 0.0))
    termination: BranchTermination = BranchTermination.FOLD
    u_star_mu1: Optional[float] = None
    extrapolation_weight: float = 1.0

    @property
    def lambda_star_bracket(self) -> Tuple[float, float]:
        return self.lambda_lo, self.lambda_hi

    @property
    def lambda_star(self) -> float:
        """Midpoint of the bracket."""
        return 0.5 * (self.lambda_lo + self.lambda_hi)

    @property
    def last(self) -> BranchPoint:
        return self.points[-1]


# ============================================================================
# Serialized reports
# ============================================================================


class SolveSummary(BaseModel):
    """JSON summary of one fixed-lambda solve."""

    model_config = ConfigDict(populate_by_name=True)

    n: int = Field(..., description="Spatial dimension.")
    p: float = Field(..., description="Nonlinearity exponent.")
    M: int = Field(..., description="Mesh intervals.")
    lam: float = Field(..., alias="lambda", description="Parameter lambda.")
    method: SolveMethod = Field(..., description="Solver used.")
    mu1: float = Field(..., description="Smallest linearized eigenvalue at the solution.")
    sup_norm: float = Field(..., description="max u over r < 1.")
    residual: float = Field(..., description="Solution-space residual.")
    iterations: int = Field(..., ge=0, description="Solver iterations.")
    min_u_minus_v: float = Field(..., description="min of u - V_lambda over r < 1.")


class MeshRefinementRow(BaseModel):
    """Continuation outcome on one mesh."""

    M: int = Field(..., description="Mesh intervals.")
    lambda_lo: float = Field(..., description="Lower end of the lambda* bracket.")
    lambda_hi: float = Field(..., description="Upper end of the lambda* bracket.")
    u_star_sup: float = Field(..., description="max u* over r < 1.")
    regular_on_mesh: bool = Field(..., description="u_star_sup <= 1 - 10 h on this mesh.")
    mu1_last: float = Field(..., description="mu1 at the last converged point.")
    nu1: float = Field(..., description="First clamped eigenvalue on this mesh.")
    mu1_over_nu1: float = Field(..., description="Semi-stability evidence at the fold.")
    u_star_mu1: Optional[float] = Field(None, description="mu1 at (u*, lambda_hi); >= -tol_eig after the pull-back.")
    termination: BranchTermination = Field(..., description="fold or ceiling.")
    points: int = Field(..., ge=1, description="Converged branch points.")


class ExtremalReport(BaseModel):
    """Regularity verdict for u* from one or more meshes."""

    n: int
    p: float
    rows: List[MeshRefinementRow] = Field(default_factory=list, description="One row per mesh, ascending M.")
    sup_relative_variation: float = Field(..., ge=0.0, description="(max - min)/max of u_star_sup across meshes.")
    bracket_relative_spread: float = Field(..., ge=0.0, description="Relative spread of bracket midpoints across meshes.")
    verdict: RegularityVerdict
    notes: List[str] = Field(default_factory=list)


class ExtinctionReport(BaseModel):
    """Comparison of the minimal solution with the profile V_lambda."""

    model_config = ConfigDict(populate_by_name=True)

    n: int
    p: float
    M: int
    lam: float = Field(..., alias="lambda", description="Parameter lambda.")
    lambda_limit: float = Field(..., description="Upper limit the check accepts.")
    ratio_deviation: float = Field(..., ge=0.0, description="sup over r < 1 of |u/V - 1|.")
    min_u_minus_v: float = Field(..., description="min over r < 1 of u - V.")
    u_sup: float
    v_sup: float
    iterations: int


class EnergyRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(..., alias="lambda")
    energy: float = Field(..., ge=0.0, description="Discrete integral of (Laplacian u)^2.")
    singular_integral: float = Field(..., ge=0.0, description="Discrete integral of (1 - u)^-2.")
    identity_rhs: float = Field(..., description="lambda times the integral of u (1 - u)^-p.")
    identity_gap: float = Field(..., ge=0.0, description="|energy - identity_rhs| / max(energy, identity_rhs).")


class EnergyReport(BaseModel):
    """Energy and singular-integral bounds along the branch."""

    n: int
    p: float
    M: int
    rows: List[EnergyRow]
    max_energy: float
    max_singular_integral: float
    ball_volume: float
    energy_ratio_near_fold: float = Field(..., description="Energy at the last point over energy near 0.9 lambda_hi.")
    singular_ratio_near_fold: float = Field(..., description="Same ratio for the integral of (1 - u)^-2.")
    bounded: bool = Field(..., description="Both ratios <= 2.")
