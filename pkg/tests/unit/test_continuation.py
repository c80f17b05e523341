import numpy as np
import pytest

from src.common.config import ProblemConfig
from src.branch.continuation import FOLD_MU_FRACTION, continue_branch, extrapolate_u_star, pull_back_u_star
from src.branch.models import BranchPoint, BranchTermination, SolveMethod
from src.branch.solvers import nonlinearity
from src.certificates.bounds import lower_bound, upper_bound
from src.discretization import RadialField, assemble_biharmonic, build_mesh
from src.linalg import SingularOperatorError, factor, solve_linear
from src.spectral import mu1, stability_weight

CONFIG = ProblemConfig(n=3, M=64)

pytestmark = pytest.mark.timeout(300)


@pytest.fixture(scope="module")
def result():
    op = assemble_biharmonic(build_mesh(CONFIG.M), CONFIG.n)
    return continue_branch(op, CONFIG, run_id="test_branch")


def _synthetic_point(lam, u):
    field = RadialField(u)
    return BranchPoint(
        lam=lam,
        u=field,
        mu1=1.0,
        sup_norm=field.sup(),
        residual=0.0,
        method=SolveMethod.NEWTON,
        iterations=1,
    )


def test_bracket_lies_inside_the_sandwich(result):
    h = CONFIG.h
    assert lower_bound(3) <= result.lambda_lo < result.lambda_hi
    assert result.lambda_hi <= upper_bound(result.nu1) * (1.0 + 10.0 * h * h)
    assert result.lambda_hi - result.lambda_lo <= CONFIG.tol_fold * result.lambda_hi
    assert result.lambda_star_bracket == (result.lambda_lo, result.lambda_hi)
    assert result.lambda_lo <= result.lambda_star <= result.lambda_hi


def test_branch_is_monotone_and_stable(result):
    points = result.points
    assert len(points) >= 20
    assert points[0].lam == 0.0
    assert points[-1].lam == result.lambda_lo

    lams = np.array([point.lam for point in points])
    sups = np.array([point.sup_norm for point in points])
    mus = np.array([point.mu1 for point in points])
    assert np.all(np.diff(lams) > 0)
    assert np.all(np.diff(sups) > 0)
    assert np.all(np.diff(mus) < 0)
    assert np.all(mus > 0)
    assert mus[-1] <= 0.05 * result.nu1
    for earlier, later in zip(points, points[1:]):
        assert np.all(later.u.values >= earlier.u.values - 1e-12)
    assert all(point.residual <= 1e-8 for point in points)


def test_extremal_solution_is_regular(result):
    assert result.u_star_sup >= result.last.sup_norm
    assert result.u_star_sup < 1.0 - 10.0 * CONFIG.h
    assert result.regular_verdict
    assert result.u_star.values[-1] == 0.0


def test_fold_signal_lies_in_the_bracket(result):
    assert result.termination == BranchTermination.FOLD
    assert result.fold_signal_lambda is not None
    width = result.lambda_hi - result.lambda_lo
    assert result.lambda_lo - width <= result.fold_signal_lambda <= result.lambda_hi + width


def test_fold_shifted_jacobian_is_numerically_singular(result):
    op = result.op
    assert result.extrapolation_weight < 1.0
    stable = stability_weight(result.last.u, result.lambda_lo, CONFIG.p, op.size)
    assert factor(op, stable, pivot_tolerance=1e-9).pivot_ratio > 1e-9

    folded = stability_weight(result.u_star, result.lambda_hi, CONFIG.p, op.size)
    with pytest.raises(SingularOperatorError):
        factor(op, folded, pivot_tolerance=1e-9)


def test_u_star_stays_on_the_stable_side(result):
    assert result.u_star_mu1 is not None
    assert result.u_star_mu1 >= -CONFIG.tol_eig
    assert 0.0 <= result.extrapolation_weight <= 1.0
    assert np.all(result.u_star.values >= result.last.u.values - 1e-12)
    again = mu1(result.op, result.u_star, result.lambda_hi, CONFIG.p, CONFIG)
    assert again.value >= -1e-6 * result.nu1


def test_pull_back_stops_before_the_unstable_side(result):
    op = result.op
    u_last = result.last.u.values
    beyond = np.minimum(1.5 * u_last, 0.9)
    beyond[-1] = 0.0
    assert mu1(op, beyond, result.lambda_hi, CONFIG.p, CONFIG).value < -CONFIG.tol_eig

    u_star, weight, value = pull_back_u_star(op, u_last, beyond, result.lambda_hi, CONFIG)

    assert 0.0 < weight < 1.0
    assert value >= -CONFIG.tol_eig
    np.testing.assert_allclose(u_star, u_last + weight * (beyond - u_last))


def test_branch_lies_above_the_linear_solution(result):
    base = factor(result.op)
    for point in result.points[1:]:
        u = point.u.values
        gap = solve_linear(base, point.lam * (nonlinearity(u, CONFIG.p) - 1.0)).values
        assert np.min(gap[:-1]) > 0.0


def test_ceiling_stop_reports_no_fold_signal():
    config = CONFIG.with_overrides(blowup_margin=0.8, damping_margin=0.8, tol_fold=1e-4)
    op = assemble_biharmonic(build_mesh(config.M), config.n)

    capped = continue_branch(op, config, run_id="test_ceiling")

    assert capped.termination == BranchTermination.CEILING
    assert capped.fold_signal_lambda is None
    assert capped.last.mu1 > FOLD_MU_FRACTION * capped.nu1
    assert capped.last.sup_norm < 0.2
    assert capped.u_star_sup <= 0.2


def test_extrapolation_recovers_square_root_profile():
    nodes = build_mesh(32).nodes
    bump = (1.0 - nodes**2) ** 2
    u_star = 0.5 * bump
    points = [_synthetic_point(lam, u_star - 0.1 * np.sqrt(1.0 - lam) * bump) for lam in (0.0, 0.75, 0.9375)]

    extrapolated, pair = extrapolate_u_star(points, 1.0, 1.0 - 1e-6)

    np.testing.assert_allclose(extrapolated, u_star, atol=1e-12)
    assert pair == (0.75, 0.9375)


def test_extrapolation_without_partner_returns_last_point():
    nodes = build_mesh(32).nodes
    bump = (1.0 - nodes**2) ** 2
    points = [_synthetic_point(0.9, 0.3 * bump), _synthetic_point(0.95, 0.31 * bump)]

    extrapolated, pair = extrapolate_u_star(points, 1.0, 1.0 - 1e-6)

    np.testing.assert_array_equal(extrapolated, points[-1].u.values)
    assert pair == (0.95, 0.95)
