"""
Cross-validation of the two nonlinear solvers and the extinction profile.

Usage:
    RUN_SLOW_TESTS=1 python -m pytest tests/integration/test_solver_acceptance.py -v
"""

import os

import numpy as np
import pytest

from src.common.config import ProblemConfig
from src.branch.reports import extinction_check
from src.branch.solvers import monotone_solve, newton_solve
from src.discretization import assemble_biharmonic, build_mesh
from src.linalg import factor

pytestmark = [
    pytest.mark.slow,
    pytest.mark.skipif(not os.getenv("RUN_SLOW_TESTS"), reason="Acceptance runs require RUN_SLOW_TESTS=1"),
]


@pytest.mark.timeout(900)
@pytest.mark.parametrize("n", [1, 3])
@pytest.mark.parametrize("fraction", [0.25, 0.5, 0.75])
def test_newton_and_monotone_agree_below_the_fold(branches, n, fraction):
    result = branches.get(n, 128)
    config = result.config
    op = result.op
    base = factor(op)
    lam = fraction * result.lambda_star

    monotone = monotone_solve(op, lam, config, base=base)
    newton = newton_solve(op, lam, np.zeros(op.size), config, base=base)

    assert np.max(np.abs(newton.u.values - monotone.u.values)) <= 1e-8
    assert newton.mu1 > 0


@pytest.mark.timeout(900)
def test_extinction_profile_at_small_lambda():
    config = ProblemConfig(n=3, M=256)
    op = assemble_biharmonic(build_mesh(256), 3)
    reports = [extinction_check(op, lam, config) for lam in (3.0, 0.3, 0.03)]

    deviations = [report.ratio_deviation for report in reports]
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[2] < 0.01
    assert all(report.min_u_minus_v > 0 for report in reports)


@pytest.mark.timeout(900)
def test_extinction_relative_to_the_extremal_parameter(branches):
    result = branches.get(3, 128)
    near = extinction_check(result.op, 1e-3 * result.lambda_star, result.config)
    far = extinction_check(result.op, 1e-2 * result.lambda_star, result.config)

    assert near.ratio_deviation <= 0.05
    assert near.ratio_deviation < far.ratio_deviation
    assert near.min_u_minus_v > 0
