"""Natural continuation of the minimal branch and bracketing of lambda*.

Stepping starts at lambda = 0 with the fixed step initial_step_fraction x
lower_bound(n), which stays inside the region where solutions are guaranteed.
The first failed step starts a bisection between the last success and the
first failure until the bracket is narrower than tol_fold x lambda_hi.

A step succeeds when Newton (seeded by a secant predictor) or, as a fallback,
the monotone iteration started from the last minimal solution converges to a
point with mu1 >= -tol_eig. The monotone fallback cannot leave the minimal
branch, so Newton is only trusted when it lands on a stable point.

A run ends at a fold when mu1 of the last point is at most 0.05 nu1, and at the
sup u ceiling otherwise. The extrapolated u* is pulled back toward the last
point until mu1(u*, lambda_hi) >= -tol_eig.
"""

from __future__ import annotations

from typing import List, Optional
from uuid import uuid4

import numpy as np

from src.common.config import ProblemConfig
from src.common.logging import get_logger, log_decision, log_event
from src.branch.models import BranchPoint, BranchSolveError, BranchTermination, ContinuationResult, FoldDetectedError
from src.branch.solvers import monotone_solve, monotone_solve_from, newton_solve
from src.certificates.bounds import lower_bound
from src.discretization.models import DiscreteBiharmonic, RadialField
from src.linalg.banded import BandedFactorization, factor
from src.spectral.eigen import mu1, nu1

logger = get_logger(__name__)

# u* is only called regular on a mesh if sup u* <= 1 - REGULARITY_MARGIN_STEPS * h.
REGULARITY_MARGIN_STEPS = 10
# mu1 / nu1 at or below this marks the linearization as degenerating.
FOLD_MU_FRACTION = 0.05
PULL_BACK_STEPS = 40


def _predict(points: List[BranchPoint], lam: float, ceiling: float) -> np.ndarray:
    """Secant predictor from the last two points, kept between u_last and the ceiling."""
    last = points[-1].u.values
    if len(points) < 2:
        guess = last.copy()
    else:
        prev = points[-2]
        slope = (last - prev.u.values) / (points[-1].lam - prev.lam)
        guess = last + (lam - points[-1].lam) * slope
    guess = np.minimum(np.maximum(guess, last), ceiling)
    guess[-1] = 0.0
    return guess


def extrapolate_u_star(points: List[BranchPoint], lambda_hi: float, ceiling: float) -> tuple[np.ndarray, tuple[float, float]]:
    """Extrapolate u* assuming u_lambda = u* + c sqrt(lambda_hi - lambda) near the fold.

    Uses the last point and the latest earlier point with s >= 2 s_last,
    s = sqrt(lambda_hi - lambda). The result is kept between u_last and the ceiling.
    """
    last = points[-1]
    s_last = np.sqrt(max(lambda_hi - last.lam, 0.0))
    partner: Optional[BranchPoint] = None
    for point in reversed(points[:-1]):
        if np.sqrt(lambda_hi - point.lam) >= 2.0 * s_last:
            partner = point
            break
    if partner is None or s_last == 0.0:
        return last.u.values.copy(), (last.lam, last.lam)
    s_partner = np.sqrt(lambda_hi - partner.lam)
    u_star = (s_partner * last.u.values - s_last * partner.u.values) / (s_partner - s_last)
    u_star = np.minimum(np.maximum(u_star, last.u.values), ceiling)
    u_star[-1] = 0.0
    return u_star, (partner.lam, last.lam)


def singular_jacobian_lambda(points: List[BranchPoint]) -> Optional[float]:
    """lambda where mu1 of the Jacobian reaches 0, from the last two points.

    Near a quadratic fold mu1^2 is linear in lambda. None when mu1 does not
    decrease between the two points.
    """
    if len(points) < 2:
        return None
    prev, last = points[-2], points[-1]
    drop = prev.mu1**2 - last.mu1**2
    if drop <= 0.0:
        return None
    return last.lam + last.mu1**2 * (last.lam - prev.lam) / drop


def pull_back_u_star(
    op: DiscreteBiharmonic,
    u_last: np.ndarray,
    u_extrapolated: np.ndarray,
    lam: float,
    config: ProblemConfig,
) -> tuple[np.ndarray, float, float]:
    """Largest t in [0, 1] with mu1(u_last + t (u_extrapolated - u_last), lam) >= -tol_eig.

    mu1 decreases in t because the candidates increase pointwise, so t is found
    by bisection. Returns the field, t and its mu1.
    """
    floor = -config.tol_eig

    def stability(t: float) -> float:
        return mu1(op, RadialField(u_last + t * (u_extrapolated - u_last)), lam, config.p, config).value

    mu_full = stability(1.0)
    if mu_full >= floor:
        return u_extrapolated.copy(), 1.0, mu_full
    lo, mu_lo = 0.0, stability(0.0)
    if mu_lo < floor:
        return u_last.copy(), 0.0, mu_lo
    hi = 1.0
    for _ in range(PULL_BACK_STEPS):
        mid = 0.5 * (lo + hi)
        mu_mid = stability(mid)
        if mu_mid >= floor:
            lo, mu_lo = mid, mu_mid
        else:
            hi = mid
    return u_last + lo * (u_extrapolated - u_last), lo, mu_lo


class _BranchTracer:
    """Holds the per-run state of one continuation."""

    def __init__(self, op: DiscreteBiharmonic, config: ProblemConfig, run_id: str):
        self.op = op
        self.config = config
        self.run_id = run_id
        self.base: BandedFactorization = factor(op)
        self.nu1 = nu1(op, config).value
        self.points: List[BranchPoint] = []

    def near_fold(self) -> bool:
        return self.points[-1].mu1 <= FOLD_MU_FRACTION * self.nu1

    def attempt(self, lam: float) -> Optional[BranchPoint]:
        config = self.config
        # Newton rejects guesses at its own ceiling.
        ceiling = float(np.nextafter(1.0 - max(config.blowup_margin, config.damping_margin), 0.0))
        guess = _predict(self.points, lam, ceiling)
        point: Optional[BranchPoint] = None
        try:
            point = newton_solve(self.op, lam, guess, config, base=self.base)
        except FoldDetectedError as exc:
            log_decision(logger, run_id=self.run_id, action="newton", outcome="fold_detected", lam=lam, reason=exc.reason)
        except BranchSolveError as exc:
            log_decision(logger, run_id=self.run_id, action="newton", outcome="no_convergence", lam=lam, reason=exc.reason)

        if point is not None and point.mu1 >= -config.tol_eig:
            return point
        if point is not None:
            log_decision(logger, run_id=self.run_id, action="newton", outcome="unstable_point", lam=lam, mu1=point.mu1)

        try:
            point = monotone_solve_from(self.op, lam, self.points[-1].u, config, base=self.base)
        except BranchSolveError as exc:
            log_decision(logger, run_id=self.run_id, action="monotone_fallback", outcome="no_convergence", lam=lam, reason=exc.reason)
            return None
        if point.mu1 < -config.tol_eig:
            log_decision(logger, run_id=self.run_id, action="monotone_fallback", outcome="unstable_point", lam=lam, mu1=point.mu1)
            return None
        log_decision(logger, run_id=self.run_id, action="monotone_fallback", outcome="converged", lam=lam)
        return point

    def trace(self) -> ContinuationResult:
        op, config = self.op, self.config
        self.points.append(monotone_solve(op, 0.0, config, base=self.base))
        step = config.initial_step_fraction * lower_bound(op.n, config.p)
        lambda_lo = 0.0
        lambda_hi: Optional[float] = None

        while True:
            if lambda_hi is None:
                lam = lambda_lo + step
            else:
                if lambda_hi - lambda_lo <= config.tol_fold * lambda_hi:
                    break
                lam = 0.5 * (lambda_lo + lambda_hi)

            point = self.attempt(lam)
            if point is not None:
                self.points.append(point)
                lambda_lo = lam
                log_decision(
                    logger,
                    run_id=self.run_id,
                    action="step",
                    outcome="accepted",
                    lam=lam,
                    sup_norm=point.sup_norm,
                    mu1=point.mu1,
                    method=point.method.value,
                )
            else:
                lambda_hi = lam
                log_decision(logger, run_id=self.run_id, action="step", outcome="rejected", lam=lam)

        termination = BranchTermination.FOLD if self.near_fold() else BranchTermination.CEILING
        fold_signal = singular_jacobian_lambda(self.points) if termination == BranchTermination.FOLD else None

        ceiling = 1.0 - config.damping_margin
        extrapolated, pair = extrapolate_u_star(self.points, lambda_hi, ceiling)
        u_star, weight, u_star_mu1 = pull_back_u_star(op, self.points[-1].u.values, extrapolated, lambda_hi, config)
        if weight < 1.0:
            log_decision(
                logger,
                run_id=self.run_id,
                action="u_star_pull_back",
                outcome="applied",
                lam=lambda_hi,
                weight=weight,
                mu1=u_star_mu1,
            )
        u_star_field = RadialField(u_star)
        u_star_sup = u_star_field.sup()
        return ContinuationResult(
            config=config,
            op=op,
            points=list(self.points),
            lambda_lo=lambda_lo,
            lambda_hi=lambda_hi,
            u_star=u_star_field,
            u_star_sup=u_star_sup,
            regular_verdict=u_star_sup <= 1.0 - REGULARITY_MARGIN_STEPS * op.mesh.h,
            nu1=self.nu1,
            fold_signal_lambda=fold_signal,
            extrapolation_pair=pair,
            termination=termination,
            u_star_mu1=u_star_mu1,
            extrapolation_weight=weight,
        )


def continue_branch(op: DiscreteBiharmonic, config: ProblemConfig, *, run_id: Optional[str] = None) -> ContinuationResult:
    """Trace the minimal branch, bracket lambda* and extrapolate u*.

    Raises:
        BranchSolveError: If even the lambda = 0 solve fails.
    """
    run_id = run_id or f"branch_{uuid4().hex[:8]}"
    log_event(logger, "continuation_started", run_id=run_id, n=op.n, M=op.M, p=config.p)
    result = _BranchTracer(op, config, run_id).trace()
    log_event(
        logger,
        "continuation_finished",
        run_id=run_id,
        n=op.n,
        M=op.M,
        lambda_lo=result.lambda_lo,
        lambda_hi=result.lambda_hi,
        points=len(result.points),
        u_star_sup=result.u_star_sup,
        termination=result.termination.value,
    )
    return result
