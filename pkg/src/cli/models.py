"""Pydantic models written by the command-line front-end."""

from __future__ import annotations

from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from src.branch.models import BranchTermination

FORMAT_VERSION = "1.0"


class SweepStatus(str, Enum):
    OK = "ok"
    ERROR = "error"
    TIMEOUT = "timeout"


class RunManifest(BaseModel):
    """Self-contained record of one command run; lists every file it wrote."""

    format_version: str = Field(default=FORMAT_VERSION, description="Version of the CSV/JSON output formats.")
    software_version: str = Field(..., description="clampfold version that produced the run.")
    command: str = Field(..., description="Subcommand name.")
    tag: str = Field(..., description="Run directory name under the command directory.")
    argv: List[str] = Field(default_factory=list, description="Arguments after the program name.")
    config: Dict[str, Any] = Field(..., description="Full ProblemConfig of the run (base dimension and mesh).")
    meshes: List[int] = Field(default_factory=list, description="Mesh sizes M used.")
    dimensions: List[int] = Field(default_factory=list, description="Dimensions n used.")
    started_at: datetime
    finished_at: datetime
    exit_code: int = Field(..., ge=0, le=3)
    outputs: List[str] = Field(default_factory=list, description="Output files relative to the run directory.")


class BranchSummary(BaseModel):
    """JSON mirror of branch.csv plus the bracket and u* summary."""

    n: int
    p: float
    M: int
    lambda_lo: float = Field(..., description="Largest lambda with a converged minimal solution.")
    lambda_hi: float = Field(..., description="Smallest lambda shown infeasible.")
    lambda_star: float = Field(..., description="Midpoint of the bracket.")
    lower_bound: float
    upper_bound: float = Field(..., description="nu1 / c_p on the same mesh.")
    nu1: float
    u_star_sup: float
    regular_on_mesh: bool
    fold_signal_lambda: Optional[float] = Field(None, description="lambda where mu1 of the Jacobian extrapolates to 0; null for a ceiling stop.")
    extrapolation_pair: List[float] = Field(..., min_length=2, max_length=2)
    termination: BranchTermination = Field(..., description="fold or ceiling.")
    u_star_mu1: Optional[float] = Field(None, description="mu1 at (u*, lambda_hi).")
    points: int = Field(..., ge=1)


class EigenSummary(BaseModel):
    """First clamped eigenvalue on one mesh."""

    n: int
    M: int
    nu1: float
    upper_bound: float = Field(..., description="nu1 / c_p for the configured p.")
    iterations: int
    residual: float
    beam_nu1: Optional[float] = Field(None, description="k^4 with tan k + tanh k = 0 (n = 1 only).")
    beam_relative_error: Optional[float] = None


class SandwichRow(BaseModel):
    """lower_bound(n) <= lambda* <= nu1/c_p on one mesh."""

    n: int
    M: int
    p: float
    lower_bound: float
    lambda_lo: float
    lambda_hi: float
    nu1: float
    upper_bound: float
    holds: bool = Field(..., description="lower_bound <= lambda_lo and lambda_hi <= upper_bound (1 + 10 h^2).")


class SweepRow(BaseModel):
    """One dimension of the critical-dimension exploration table."""

    n: int
    M: int
    p: float
    status: SweepStatus
    lambda_star: Optional[float] = Field(None, description="Midpoint of the lambda* bracket.")
    lambda_lo: Optional[float] = None
    lambda_hi: Optional[float] = None
    upper_bound: Optional[float] = Field(None, description="nu1 / c_p on the same mesh.")
    lower_bound: float
    u_star_sup: Optional[float] = None
    regular_verdict: Optional[bool] = Field(None, description="sup u* <= 1 - 10 h on this mesh.")
    mu1_over_nu1: Optional[float] = None
    termination: Optional[BranchTermination] = Field(None, description="fold or ceiling; null for failed rows.")
    error: Optional[str] = None


class Diagnostic(BaseModel):
    """Written when a command fails for a reason other than a failed solve."""

    error_type: str
    message: str
    command: Optional[str] = None
    config: Optional[Dict[str, Any]] = None
