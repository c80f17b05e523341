"""Reports derived from branch runs: regularity of u*, extinction profile, energy bounds."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from src.common.config import ConfigError, ProblemConfig
from src.common.logging import get_logger, log_event
from src.branch.continuation import REGULARITY_MARGIN_STEPS
from src.branch.models import (
    ContinuationResult,
    EnergyReport,
    EnergyRow,
    ExtinctionReport,
    ExtremalReport,
    MeshRefinementRow,
    RegularityVerdict,
)
from src.branch.solvers import monotone_solve, nonlinearity
from src.certificates.bounds import lower_bound
from src.discretization.models import DiscreteBiharmonic
from src.linalg.banded import factor, solve_linear
from src.spectral.quadrature import ball_volume, integrate, radial_weights

logger = get_logger(__name__)

# Largest relative change of sup u* between meshes still called mesh-stable.
SUP_VARIATION_LIMIT = 0.01
ENERGY_RATIO_LIMIT = 2.0
NEAR_FOLD_FRACTION = 0.9


def extremal_report(results: Sequence[ContinuationResult], config: Optional[ProblemConfig] = None) -> ExtremalReport:
    """Regularity verdict for u* from continuation runs on one or more meshes.

    regular-consistent when sup u* <= 1 - 10 h on every mesh and varies by at most
    1% across meshes; singular-suspect otherwise.
    """
    if not results:
        raise ValueError("extremal_report needs at least one continuation result")
    ordered = sorted(results, key=lambda result: result.op.M)
    config = config or ordered[0].config
    rows = []
    for result in ordered:
        h = result.op.mesh.h
        mu1_last = result.last.mu1
        rows.append(
            MeshRefinementRow(
                M=result.op.M,
                lambda_lo=result.lambda_lo,
                lambda_hi=result.lambda_hi,
                u_star_sup=result.u_star_sup,
                regular_on_mesh=result.u_star_sup <= 1.0 - REGULARITY_MARGIN_STEPS * h,
                mu1_last=mu1_last,
                nu1=result.nu1,
                mu1_over_nu1=mu1_last / result.nu1,
                u_star_mu1=result.u_star_mu1,
                termination=result.termination,
                points=len(result.points),
            )
        )

    sups = np.array([row.u_star_sup for row in rows])
    variation = float((sups.max() - sups.min()) / sups.max()) if sups.max() > 0 else 0.0
    mids = np.array([0.5 * (row.lambda_lo + row.lambda_hi) for row in rows])
    spread = float((mids.max() - mids.min()) / mids.max())

    notes = [
        "u* is extrapolated in sqrt(lambda_hi - lambda); the rate is an assumption of the fold model.",
        "Stability eigenvalues are computed over radial functions only.",
    ]
    if len(rows) == 1:
        notes.append("Single mesh: refinement stability not assessed.")
    regular = all(row.regular_on_mesh for row in rows) and variation <= SUP_VARIATION_LIMIT
    report = ExtremalReport(
        n=ordered[0].op.n,
        p=config.p,
        rows=rows,
        sup_relative_variation=variation,
        bracket_relative_spread=spread,
        verdict=RegularityVerdict.REGULAR_CONSISTENT if regular else RegularityVerdict.SINGULAR_SUSPECT,
        notes=notes,
    )
    log_event(logger, "extremal_report", n=report.n, verdict=report.verdict.value, sup_variation=variation)
    return report


def extinction_check(
    op: DiscreteBiharmonic,
    lam: float,
    config: ProblemConfig,
    *,
    lambda_limit: Optional[float] = None,
) -> ExtinctionReport:
    """Compare the minimal solution with V_lambda = lambda (1 - r^2)^2 / (8 n (n + 2)).

    u - V is computed as the clamped solve of lambda (f(u) - 1), which equals
    u - V in exact arithmetic and keeps its sign in floating point.

    Raises:
        ConfigError: If lam <= 0 or lam >= lambda_limit (default lower_bound(n)).
    """
    limit = lambda_limit if lambda_limit is not None else lower_bound(op.n, config.p)
    if not 0.0 < lam < limit:
        raise ConfigError(f"extinction_check requires 0 < lambda < {limit}, got {lam}")
    base = factor(op)
    point = monotone_solve(op, lam, config, base=base)
    u = point.u.values
    nodes = op.mesh.nodes
    profile = lam * (1.0 - nodes**2) ** 2 / (8.0 * op.n * (op.n + 2))
    gap = solve_linear(base, lam * (nonlinearity(u, config.p) - 1.0)).values
    ratio_deviation = float(np.max(np.abs(gap[:-1] / profile[:-1])))
    return ExtinctionReport(
        n=op.n,
        p=config.p,
        M=op.M,
        lam=lam,
        lambda_limit=limit,
        ratio_deviation=ratio_deviation,
        min_u_minus_v=float(np.min(gap[:-1])),
        u_sup=point.sup_norm,
        v_sup=float(profile[0]),
        iterations=point.iterations,
    )


def h02_norm_bound_check(result: ContinuationResult) -> EnergyReport:
    """Discrete energy of the Laplacian and the integral of (1 - u)^-2 along the branch.

    Both are bounded when their value at the last point is at most twice the value
    at the point closest to 0.9 lambda_hi.

    The energy is also compared with lambda times the integral of u f(u), which it
    equals for clamped solutions; the relative gap is a discretization error.
    """
    op = result.op
    p = result.config.p
    weights = radial_weights(op.mesh, op.n)
    rows = []
    for point in result.points:
        u = point.u.values
        laplacian = op.laplacian @ u
        energy = integrate(weights, laplacian**2)
        singular = integrate(weights, (1.0 - u) ** -2)
        rhs = point.lam * integrate(weights, u * nonlinearity(u, p))
        scale = max(energy, abs(rhs))
        rows.append(
            EnergyRow(
                lam=point.lam,
                energy=energy,
                singular_integral=singular,
                identity_rhs=rhs,
                identity_gap=abs(energy - rhs) / scale if scale > 0 else 0.0,
            )
        )

    target = NEAR_FOLD_FRACTION * result.lambda_hi
    reference = min(rows, key=lambda row: abs(row.lam - target))
    ratio = rows[-1].energy / reference.energy if reference.energy > 0 else float("inf")
    singular_ratio = rows[-1].singular_integral / reference.singular_integral
    return EnergyReport(
        n=op.n,
        p=p,
        M=op.M,
        rows=rows,
        max_energy=max(row.energy for row in rows),
        max_singular_integral=max(row.singular_integral for row in rows),
        ball_volume=ball_volume(op.n),
        energy_ratio_near_fold=ratio,
        singular_ratio_near_fold=singular_ratio,
        bounded=ratio <= ENERGY_RATIO_LIMIT and singular_ratio <= ENERGY_RATIO_LIMIT,
    )
