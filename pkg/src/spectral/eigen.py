"""Ground states of the clamped radial biharmonic by shift-and-invert iteration.

All three problems share one kernel: find the smallest eigenvalue of the pencil

    (op - diag(D)) phi = value * W phi,    phi_M = 0

by iterating x <- (op - diag(D) - sigma W)^(-1) W x. The eigenvalue estimate is
sigma + <x, W x> / <x, W y> in the radial measure, and the iteration stops when
||x - (value - sigma) y||_inf <= tol_eig ||x||_inf. Once the residual is below
1e-4 the shift moves 90% of the way to the Rayleigh quotient and the operator is
refactored once; the target stays the eigenvalue nearest the shift.

* nu1: D = 0, W = 1.
* mu1: D = lambda p (1 - u)^(-p-1), W = 1.
* weighted_beta: D = 0, W = p (1 - omega)^(-(p+1)).
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy import optimize

from src.common.config import DEFAULT_R_MIN_CERTIFICATE, ProblemConfig
from src.common.logging import get_logger
from src.discretization.models import DiscreteBiharmonic, FieldLike, RadialField, field_values
from src.linalg.banded import SingularOperatorError, factor, solve_linear
from src.spectral.models import CertificateDomainError, ConvergenceError, EigenPair, SingularWeightError
from src.spectral.quadrature import inner, norm, radial_weights

logger = get_logger(__name__)

# Relative size of the fallback shift used when op - D is singular at sigma = 0.
FALLBACK_SHIFT_FRACTION = 1e-3
# Residual at which the shift is moved toward the Rayleigh quotient, and how far.
RAYLEIGH_SWITCH = 1e-4
RAYLEIGH_FRACTION = 0.9


def beam_oracle() -> tuple[float, float]:
    """Smallest positive root k of tan k + tanh k = 0 and the beam eigenvalue k^4.

    This is the symmetric clamped mode on (-1, 1), i.e. nu1 for n = 1.
    """
    k = optimize.brentq(lambda t: np.tan(t) + np.tanh(t), 2.0, 3.0, xtol=1e-14)
    return float(k), float(k**4)


def _ground_state(
    op: DiscreteBiharmonic,
    *,
    shift: np.ndarray,
    weight: np.ndarray,
    sigma: float,
    config: ProblemConfig,
    label: str,
    accelerate: bool = True,
) -> EigenPair:
    fact = factor(op, shift + sigma * weight)
    quad = radial_weights(op.mesh, op.n)
    nodes = op.mesh.nodes

    x = (1.0 - nodes**2) ** 2
    x /= norm(quad, x)
    residual = np.inf
    for iteration in range(1, config.max_eigen_iterations + 1):
        y = solve_linear(fact, weight * x).values
        value = sigma + inner(quad, x, weight * x) / inner(quad, x, weight * y)
        residual = float(np.max(np.abs(x - (value - sigma) * y)) / np.max(np.abs(x)))
        if residual <= config.tol_eig:
            logger.debug(
                "eigen_converged",
                extra={"event": "eigen_converged", "problem": label, "value": value, "iterations": iteration},
            )
            return EigenPair(
                value=float(value),
                field=RadialField(x),
                iterations=iteration,
                residual=residual,
                shift=sigma,
            )
        if accelerate and residual <= RAYLEIGH_SWITCH:
            accelerate = False
            target = sigma + RAYLEIGH_FRACTION * (value - sigma)
            try:
                fact = factor(op, shift + target * weight)
                sigma = target
            except SingularOperatorError:
                logger.debug("eigen_shift_kept", extra={"event": "eigen_shift_kept", "problem": label, "sigma": sigma})
        x = y / norm(quad, y)
        if np.dot(quad, x) < 0:
            x = -x

    raise ConvergenceError(
        f"{label}: inverse iteration did not converge in {config.max_eigen_iterations} iterations "
        f"(residual {residual:.3e} > {config.tol_eig:.1e})",
        iterations=config.max_eigen_iterations,
        residual=float(residual),
    )


def nu1(op: DiscreteBiharmonic, config: Optional[ProblemConfig] = None) -> EigenPair:
    """First clamped eigenvalue and its positive eigenfunction.

    Raises:
        ConvergenceError: If the iteration cap is reached.
    """
    config = config or ProblemConfig()
    ones = np.ones(op.size)
    return _ground_state(op, shift=np.zeros(op.size), weight=ones, sigma=0.0, config=config, label="nu1")


def stability_weight(u: FieldLike, lam: float, p: float, size: int) -> np.ndarray:
    """lambda p (1 - u)^(-p-1) at nodes r < 1; the constraint entry is 0."""
    values = field_values(u, size)
    if np.any(values[:-1] >= 1.0):
        raise SingularWeightError("u touches 1; the linearized weight is infinite")
    weight = np.zeros(size)
    weight[:-1] = lam * p * (1.0 - values[:-1]) ** (-p - 1.0)
    return weight


def mu1(
    op: DiscreteBiharmonic,
    u: FieldLike,
    lam: float,
    p: float = 1.0,
    config: Optional[ProblemConfig] = None,
) -> EigenPair:
    """Smallest eigenvalue of the linearization op - lambda p (1 - u)^(-p-1).

    The iteration runs at sigma = 0 and moves to a small negative shift if the
    Jacobian itself is singular. A negative result is recomputed from a shift
    below the whole spectrum so that the ground state, not the eigenvalue
    closest to 0, is returned.

    Raises:
        SingularWeightError: If u >= 1 at a node r < 1.
        ConvergenceError: If the iteration cap is reached.
    """
    config = config or ProblemConfig()
    shift = stability_weight(u, lam, p, op.size)
    ones = np.ones(op.size)
    try:
        pair = _ground_state(op, shift=shift, weight=ones, sigma=0.0, config=config, label="mu1")
    except SingularOperatorError:
        sigma = -FALLBACK_SHIFT_FRACTION * max(1.0, float(shift.max()))
        logger.info(
            "mu1_shift_fallback",
            extra={"event": "mu1_shift_fallback", "lambda": lam, "sigma": sigma},
        )
        pair = _ground_state(op, shift=shift, weight=ones, sigma=sigma, config=config, label="mu1")
    if pair.value < 0:
        sigma = -(1.01 * float(shift.max()) + 1.0)
        pair = _ground_state(op, shift=shift, weight=ones, sigma=sigma, config=config, label="mu1")
    return pair


def certificate_weight(
    op: DiscreteBiharmonic,
    omega: FieldLike,
    *,
    p: float = 1.0,
    r_min: float = DEFAULT_R_MIN_CERTIFICATE,
) -> np.ndarray:
    """Weight p (1 - omega)^(-(p+1)) with the r < r_min cutoff.

    If omega < 1 at every node r < 1 the full weight is used. Otherwise nodes with
    r < r_min take the weight of the first node r >= r_min.

    Raises:
        CertificateDomainError: If omega >= 1 at a node r_min <= r < 1, or the
            resulting weight is not finite and positive.
    """
    values = field_values(omega, op.size)
    inside = values[:-1]
    nodes = op.mesh.nodes[:-1]
    weight = np.empty(op.size)
    if np.all(inside < 1.0):
        weight[:-1] = p * (1.0 - inside) ** (-(p + 1.0))
    else:
        included = nodes >= r_min
        if not np.any(included):
            raise CertificateDomainError(f"No mesh node r < 1 satisfies r >= r_min = {r_min}")
        if np.any(inside[included] >= 1.0):
            raise CertificateDomainError(f"omega >= 1 at a node with r >= r_min = {r_min}")
        first = int(np.argmax(included))
        weight[first:-1] = p * (1.0 - inside[first:]) ** (-(p + 1.0))
        weight[:first] = weight[first]
    if not np.all(np.isfinite(weight[:-1])) or np.any(weight[:-1] <= 0):
        raise CertificateDomainError("Certificate weight must be finite and positive at included nodes")
    weight[-1] = weight[-2]
    return weight


def weighted_beta(
    op: DiscreteBiharmonic,
    omega: FieldLike,
    *,
    p: float = 1.0,
    r_min: float = DEFAULT_R_MIN_CERTIFICATE,
    config: Optional[ProblemConfig] = None,
) -> EigenPair:
    """Smallest beta with op phi = beta p (1 - omega)^(-(p+1)) phi on the clamped space.

    For p = 1 the weight is (1 - omega)^(-2).

    Raises:
        CertificateDomainError: See certificate_weight.
        ConvergenceError: If the iteration cap is reached.
    """
    config = config or ProblemConfig()
    weight = certificate_weight(op, omega, p=p, r_min=r_min)
    return _ground_state(op, shift=np.zeros(op.size), weight=weight, sigma=0.0, config=config, label="weighted_beta")
