"""Certificate inputs and reports.

CertificateSpec is a dataclass because it may carry a field; CertificateReport
is a pydantic model written verbatim by the command-line front-end.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from src.common.config import DEFAULT_R_MIN_CERTIFICATE, ConfigError
from src.discretization.models import RadialField

# Re-exported so certificate callers catch one family.
from src.spectral.models import CertificateDomainError  # noqa: F401


# ============================================================================
# Enums
# ============================================================================


class CertificateKind(str, Enum):
    OMEGA_ALPHA = "omega_alpha"
    G_BETA = "g_beta"
    SINGULARITY = "singularity"
    SINGULAR_PROFILE = "singular-profile"
    UPPER = "upper"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"
    NO_CONCLUSION = "no-conclusion"


# ============================================================================
# Specs
# ============================================================================


@dataclass(frozen=True, eq=False)
class CertificateSpec:
    """Parameters of one certificate check.

    Attributes:
        kind: Which construction is checked.
        n: Spatial dimension.
        p: Nonlinearity exponent.
        alpha: Amplitude of omega_alpha = alpha (1 - r^2)^2, in (0, 1).
        c0: Log offset C0 > 0 of g_beta = (C0 - log r)^beta.
        beta_exp: Exponent beta in (0, 1) of g_beta.
        amplitude: A > 0 in the supersolution 1 - A r^2 g_beta.
        omega: Candidate field for the singularity certificate.
        lambda_prime: lambda' > 0 of the singularity certificate.
        beta_claim: Optional claimed weighted stability constant.
        r_min: Exclusion radius in (0, 0.5) for log- or power-singular fields.
    """

    kind: CertificateKind
    n: int
    p: float = 1.0
    alpha: Optional[float] = None
    c0: Optional[float] = None
    beta_exp: Optional[float] = None
    amplitude: Optional[float] = None
    omega: Optional[RadialField] = None
    lambda_prime: Optional[float] = None
    beta_claim: Optional[float] = None
    r_min: float = DEFAULT_R_MIN_CERTIFICATE

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"Dimension n must be an integer >= 1, got {self.n}")
        if not self.p > 0:
            raise ConfigError(f"Exponent p must be positive, got {self.p}")
        if not 0.0 < self.r_min < 0.5:
            raise ConfigError(f"r_min must lie in (0, 0.5), got {self.r_min}")
        if self.kind == CertificateKind.OMEGA_ALPHA:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        elif self.kind == CertificateKind.G_BETA:
            if self.c0 is None or not self.c0 > 0:
                raise ConfigError(f"C0 must be positive, got {self.c0}")
            if self.beta_exp is None or not 0.0 < self.beta_exp < 1.0:
                raise ConfigError(f"beta must lie in (0, 1), got {self.beta_exp}")
            if self.amplitude is None or not self.amplitude > 0:
                raise ConfigError(f"A must be positive, got {self.amplitude}")
        elif self.kind == CertificateKind.SINGULARITY:
            if self.omega is None:
                raise ConfigError("The singularity certificate needs an omega field")
            if self.lambda_prime is None or not self.lambda_prime > 0:
                raise ConfigError(f"lambda' must be positive, got {self.lambda_prime}")
            if self.beta_claim is not None and not self.beta_claim > 0:
                raise ConfigError(f"Claimed beta must be positive, got {self.beta_claim}")

    @classmethod
    def omega_alpha(cls, n: int, alpha: float, p: float = 1.0) -> "CertificateSpec":
        return cls(kind=CertificateKind.OMEGA_ALPHA, n=n, p=p, alpha=alpha)

    @classmethod
    def g_beta(
        cls,
        n: int,
        *,
        c0: float = 0.25,
        amplitude: float = 2.0,
        beta_exp: float = 0.5,
        r_min: float = DEFAULT_R_MIN_CERTIFICATE,
    ) -> "CertificateSpec":
        return cls(kind=CertificateKind.G_BETA, n=n, c0=c0, amplitude=amplitude, beta_exp=beta_exp, r_min=r_min)

    @classmethod
    def singularity(
        cls,
        n: int,
        omega: RadialField,
        lambda_prime: float,
        *,
        p: float = 1.0,
        beta_claim: Optional[float] = None,
        r_min: float = DEFAULT_R_MIN_CERTIFICATE,
    ) -> "CertificateSpec":
        return cls(
            kind=CertificateKind.SINGULARITY,
            n=n,
            p=p,
            omega=omega,
            lambda_prime=lambda_prime,
            beta_claim=beta_claim,
            r_min=r_min,
        )


# ============================================================================
# Reports
# ============================================================================


class CertificateReport(BaseModel):
    """Outcome of one discrete certificate check."""

    kind: CertificateKind
    n: int
    p: float = 1.0
    M: int = Field(..., description="Mesh intervals of the discrete check.")
    verdict: Verdict
    margin: Optional[float] = Field(None, description="min over checked nodes of LHS - RHS.")
    tolerance: Optional[float] = Field(None, ge=0.0, description="Allowed negative margin.")
    scale: Optional[float] = Field(None, ge=0.0, description="max |LHS| over checked nodes.")
    nodes_checked: List[int] = Field(default_factory=list, description="First and last checked node index.")
    r_range: List[float] = Field(default_factory=list, description="Radii of the first and last checked node.")
    derived_bound: Optional[float] = Field(None, description="The lambda value the certificate establishes.")
    notes: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict, description="Kind-specific quantities.")
