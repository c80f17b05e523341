import dataclasses

import numpy as np
import pytest

from src.common.config import ConfigError, ProblemConfig
from src.branch.continuation import continue_branch
from src.branch.models import BranchPoint, BranchTermination, RegularityVerdict, SolveMethod
from src.branch.reports import extinction_check, extremal_report, h02_norm_bound_check
from src.discretization import RadialField, assemble_biharmonic, build_mesh
from src.spectral import ball_volume

CONFIG = ProblemConfig(n=3, M=64)

pytestmark = pytest.mark.timeout(300)


@pytest.fixture(scope="module")
def op():
    return assemble_biharmonic(build_mesh(CONFIG.M), CONFIG.n)


@pytest.fixture(scope="module")
def result(op):
    return continue_branch(op, CONFIG, run_id="test_reports")


def test_extremal_report_on_single_mesh(result):
    report = extremal_report([result])

    assert report.n == 3
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row.M == CONFIG.M
    assert row.mu1_over_nu1 <= 0.05
    assert row.points == len(result.points)
    assert row.termination == BranchTermination.FOLD
    assert row.u_star_mu1 >= -CONFIG.tol_eig
    assert report.sup_relative_variation == 0.0
    assert report.verdict == RegularityVerdict.REGULAR_CONSISTENT
    assert any("Single mesh" in note for note in report.notes)


def test_extremal_report_needs_a_result():
    with pytest.raises(ValueError):
        extremal_report([])


def test_extinction_profile_tightens_as_lambda_shrinks(op):
    far = extinction_check(op, 0.3, CONFIG)
    near = extinction_check(op, 0.03, CONFIG)

    assert near.ratio_deviation < far.ratio_deviation
    assert far.min_u_minus_v > 0
    assert near.min_u_minus_v > 0
    assert far.u_sup > far.v_sup
    assert far.lambda_limit == 30.0


@pytest.mark.parametrize("lam", [0.0, -1.0, 30.0, 45.0])
def test_extinction_rejects_lambda_outside_range(op, lam):
    with pytest.raises(ConfigError):
        extinction_check(op, lam, CONFIG)


def test_energy_stays_bounded_up_to_the_fold(result):
    report = h02_norm_bound_check(result)

    assert len(report.rows) == len(result.points)
    assert report.rows[0].energy == 0.0
    assert all(row.identity_gap < 0.05 for row in report.rows)
    assert report.bounded
    assert report.max_energy == report.rows[-1].energy
    assert report.ball_volume == pytest.approx(ball_volume(3))
    assert report.singular_ratio_near_fold <= 2.0
    assert report.rows[0].singular_integral == pytest.approx(ball_volume(3), rel=1e-2)


def _scaled_point(op, lam, scale):
    field = RadialField(scale * (1.0 - op.mesh.nodes**2) ** 2)
    return BranchPoint(
        lam=lam,
        u=field,
        mu1=1.0,
        sup_norm=field.sup(),
        residual=0.0,
        method=SolveMethod.MONOTONE,
        iterations=1,
    )


def test_singular_integral_alone_can_break_the_bound(result, op):
    points = [_scaled_point(op, lam, scale) for lam, scale in ((0.0, 0.0), (0.9, 0.71), (1.0, 0.99))]
    synthetic = dataclasses.replace(result, points=points, lambda_lo=1.0, lambda_hi=1.0)

    report = h02_norm_bound_check(synthetic)

    assert report.energy_ratio_near_fold == pytest.approx((0.99 / 0.71) ** 2, rel=1e-9)
    assert report.energy_ratio_near_fold <= 2.0
    assert report.singular_ratio_near_fold > 2.0
    assert not report.bounded
    assert np.isfinite(report.max_singular_integral)
