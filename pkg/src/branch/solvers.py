"""Fixed-lambda solvers for op u = lambda (1 - u)^(-p) with clamped data.

Residuals are measured in solution space, ||op^-1 (op u - lambda f(u))||_inf,
so that the tolerance reads in units of deflection on every mesh.

Exports:
    - nonlinearity, nonlinearity_derivative: f(u) = (1 - u)^(-p) and f'(u)
    - solution_residual: Solution-space residual of a candidate
    - monotone_solve: Minimal solution by monotone iteration from 0
    - monotone_solve_from: Same iteration started from a known subsolution
    - newton_solve: Damped Newton iteration
"""

from __future__ import annotations

from typing import List, Optional

import numpy as np

from src.common.config import ProblemConfig
from src.common.logging import get_logger
from src.discretization.models import DiscreteBiharmonic, FieldLike, RadialField, field_values
from src.discretization.operator import apply
from src.linalg.banded import BandedFactorization, SingularOperatorError, factor, solve_linear
from src.branch.models import BranchPoint, FoldDetectedError, NoConvergenceError, SolveMethod
from src.spectral.eigen import mu1

logger = get_logger(__name__)

MAX_STEP_HALVINGS = 30

# Allowed decrease of a monotone increment, relative to the iterate size.
MONOTONE_SLACK = 1e-12


def nonlinearity(u: np.ndarray, p: float) -> np.ndarray:
    return (1.0 - u) ** (-p)


def nonlinearity_derivative(u: np.ndarray, p: float) -> np.ndarray:
    return p * (1.0 - u) ** (-p - 1.0)


def solution_residual(
    op: DiscreteBiharmonic,
    u: FieldLike,
    lam: float,
    p: float,
    base: Optional[BandedFactorization] = None,
) -> float:
    """||op^-1 (op u - lam f(u))||_inf over all nodes; inf if u >= 1 somewhere."""
    base = base or factor(op)
    values = field_values(u, op.size)
    if np.any(values[:-1] >= 1.0):
        return float("inf")
    defect = apply(op, values).values - lam * nonlinearity(values, p)
    return float(np.max(np.abs(solve_linear(base, defect).values)))


def _point(
    op: DiscreteBiharmonic,
    u: np.ndarray,
    lam: float,
    config: ProblemConfig,
    base: BandedFactorization,
    method: SolveMethod,
    iterations: int,
) -> BranchPoint:
    field = RadialField(u)
    return BranchPoint(
        lam=float(lam),
        u=field,
        mu1=mu1(op, field, lam, config.p, config).value,
        sup_norm=field.sup(),
        residual=solution_residual(op, field, lam, config.p, base),
        method=method,
        iterations=iterations,
    )


def _monotone_iterate(
    op: DiscreteBiharmonic,
    lam: float,
    start: np.ndarray,
    config: ProblemConfig,
    base: BandedFactorization,
    record: Optional[List[RadialField]],
) -> BranchPoint:
    """Iterate u_{k+1} = op^-1 (lam f(u_k)) in increment form.

    d_{k+1} = op^-1 (lam (f(u_k) - f(u_{k-1}))) keeps the increments free of the
    cancellation in op^-1 applied to the full right-hand side.
    """
    p = config.p
    ceiling = 1.0 - config.blowup_margin
    previous = start.copy()
    current = solve_linear(base, lam * nonlinearity(previous, p)).values
    step = current - previous

    for iteration in range(1, config.max_monotone_iterations + 1):
        if record is not None:
            record.append(RadialField(current))
        sup = float(np.max(current[:-1]))
        if sup >= ceiling or not np.all(np.isfinite(current)):
            logger.debug(
                "monotone_blowup",
                extra={"event": "monotone_blowup", "lambda": lam, "iteration": iteration, "sup": sup},
            )
            raise NoConvergenceError(
                f"Monotone iterates reached sup u = {sup:.6f} >= {ceiling} at lambda = {lam}",
                lam=lam,
                iterations=iteration,
                reason="blowup",
            )
        slack = MONOTONE_SLACK * max(1.0, float(np.max(np.abs(current))))
        if float(np.min(step[:-1])) < -slack:
            logger.warning(
                "monotone_order_violated",
                extra={
                    "event": "monotone_order_violated",
                    "lambda": lam,
                    "iteration": iteration,
                    "min_increment": float(np.min(step[:-1])),
                },
            )
        if float(np.max(np.abs(step))) <= config.tol_newton:
            return _point(op, current, lam, config, base, SolveMethod.MONOTONE, iteration)

        step = solve_linear(base, lam * (nonlinearity(current, p) - nonlinearity(previous, p))).values
        previous = current
        current = current + step

    raise NoConvergenceError(
        f"Monotone iteration did not converge in {config.max_monotone_iterations} iterations at lambda = {lam}",
        lam=lam,
        iterations=config.max_monotone_iterations,
        reason="iteration cap",
    )


def monotone_solve(
    op: DiscreteBiharmonic,
    lam: float,
    config: ProblemConfig,
    *,
    base: Optional[BandedFactorization] = None,
    record: Optional[List[RadialField]] = None,
) -> BranchPoint:
    """Minimal solution as the increasing limit of the iteration from u_0 = 0.

    Iterates are appended to ``record`` when given.

    Raises:
        ValueError: If lam < 0.
        NoConvergenceError: If sup u reaches 1 - blowup_margin or the cap is hit.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    base = base or factor(op)
    return _monotone_iterate(op, lam, np.zeros(op.size), config, base, record)


def monotone_solve_from(
    op: DiscreteBiharmonic,
    lam: float,
    start: FieldLike,
    config: ProblemConfig,
    *,
    base: Optional[BandedFactorization] = None,
    record: Optional[List[RadialField]] = None,
) -> BranchPoint:
    """Monotone iteration started from a subsolution, e.g. the minimal solution at a smaller lambda.

    The limit is still the minimal solution at lam because the start lies below it.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    base = base or factor(op)
    values = np.array(field_values(start, op.size), dtype=float)
    values[-1] = 0.0
    return _monotone_iterate(op, lam, values, config, base, record)


def newton_solve(
    op: DiscreteBiharmonic,
    lam: float,
    guess: FieldLike,
    config: ProblemConfig,
    *,
    base: Optional[BandedFactorization] = None,
) -> BranchPoint:
    """Damped Newton iteration on F(u) = op u - lam (1 - u)^(-p).

    Each step is halved until sup u < 1 - damping_margin and the residual
    decreases. The iteration stops once the residual is <= tol_newton.

    Raises:
        FoldDetectedError: If the Jacobian op - lam f'(u) is singular.
        NoConvergenceError: If damping fails or the iteration cap is hit.
    """
    p = config.p
    base = base or factor(op)
    u = np.array(field_values(guess, op.size), dtype=float)
    u[-1] = 0.0
    ceiling = 1.0 - config.damping_margin
    if np.any(u[:-1] >= ceiling):
        raise ValueError(f"Newton guess must stay below {ceiling} at r < 1")

    residual = solution_residual(op, u, lam, p, base)
    for iteration in range(config.max_newton_iterations + 1):
        if residual <= config.tol_newton:
            return _point(op, u, lam, config, base, SolveMethod.NEWTON, iteration)
        if iteration == config.max_newton_iterations:
            break

        jacobian_shift = np.zeros(op.size)
        jacobian_shift[:-1] = lam * nonlinearity_derivative(u[:-1], p)
        try:
            jacobian = factor(op, jacobian_shift)
        except SingularOperatorError as exc:
            raise FoldDetectedError(
                f"Newton Jacobian singular at lambda = {lam} (pivot ratio {exc.pivot_ratio:.3e})",
                lam=lam,
                iterations=iteration,
                reason="singular jacobian",
            ) from exc
        defect = apply(op, u).values - lam * nonlinearity(u, p)
        delta = solve_linear(jacobian, -defect).values

        t = 1.0
        for _ in range(MAX_STEP_HALVINGS):
            trial = u + t * delta
            if float(np.max(trial[:-1])) < ceiling:
                trial_residual = solution_residual(op, trial, lam, p, base)
                if trial_residual < residual:
                    break
            t *= 0.5
        else:
            raise NoConvergenceError(
                f"Newton damping failed at lambda = {lam} after {MAX_STEP_HALVINGS} halvings "
                f"(residual {residual:.3e})",
                lam=lam,
                iterations=iteration + 1,
                reason="damping failed",
            )
        logger.debug(
            "newton_step",
            extra={"event": "newton_step", "lambda": lam, "iteration": iteration + 1, "step": t, "residual": trial_residual},
        )
        u = trial
        residual = trial_residual

    raise NoConvergenceError(
        f"Newton did not converge in {config.max_newton_iterations} iterations at lambda = {lam} "
        f"(residual {residual:.3e})",
        lam=lam,
        iterations=config.max_newton_iterations,
        reason="iteration cap",
    )
