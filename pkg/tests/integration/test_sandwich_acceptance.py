"""
Acceptance runs for the lambda* sandwich and the regularity verdict.

Every dimension n = 2..10 is continued to the fold on M = 256 and M = 512.

Usage:
    RUN_SLOW_TESTS=1 python -m pytest tests/integration/test_sandwich_acceptance.py -v
"""

import os

import pytest

from src.branch.models import RegularityVerdict
from src.branch.reports import extremal_report
from src.certificates.bounds import lower_bound, upper_bound

pytestmark = [
    pytest.mark.slow,
    pytest.mark.skipif(not os.getenv("RUN_SLOW_TESTS"), reason="Acceptance runs require RUN_SLOW_TESTS=1"),
]

MESHES = (256, 512)


@pytest.mark.timeout(1800)
@pytest.mark.parametrize("n", range(2, 11))
def test_sandwich_holds_on_both_meshes(branches, n):
    midpoints = []
    for M in MESHES:
        result = branches.get(n, M)
        h = 1.0 / M
        assert lower_bound(n) <= result.lambda_lo
        assert result.lambda_hi <= upper_bound(result.nu1) * (1.0 + 10.0 * h * h)
        midpoints.append(result.lambda_star)
    assert abs(midpoints[0] - midpoints[1]) / midpoints[1] <= 0.01


@pytest.mark.timeout(1800)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_low_dimensions_have_regular_extremal_solutions(branches, n):
    report = extremal_report([branches.get(n, M) for M in MESHES])

    assert report.verdict == RegularityVerdict.REGULAR_CONSISTENT
    assert report.sup_relative_variation <= 0.01
    for row in report.rows:
        assert row.u_star_sup <= 0.999
        assert row.mu1_over_nu1 <= 0.05


@pytest.mark.timeout(1800)
def test_branch_structure_on_fine_mesh(branches):
    result = branches.get(3, 256)
    points = result.points
    assert len(points) >= 20
    for earlier, later in zip(points, points[1:]):
        assert later.lam > earlier.lam
        assert later.sup_norm > earlier.sup_norm
        assert 0 < later.mu1 < earlier.mu1
    assert result.lambda_hi - result.lambda_lo <= result.config.tol_fold * result.lambda_hi
