"""
End-to-end runs through the command-line surface on coarse meshes.

Usage:
    RUN_SLOW_TESTS=1 python -m pytest tests/integration/test_cli_runs.py -v
"""

import csv
import json
import os

import pytest

from src.cli.main import EXIT_OK, main

pytestmark = [
    pytest.mark.integration,
    pytest.mark.skipif(not os.getenv("RUN_SLOW_TESTS"), reason="End-to-end runs require RUN_SLOW_TESTS=1"),
]


def _run(tmp_path, *argv):
    return main([*argv, "--output-dir", str(tmp_path)])


@pytest.mark.timeout(900)
def test_lambda_star_refinement_run(tmp_path):
    assert _run(tmp_path, "lambda-star", "--n", "3", "--M", "64,128", "--tag", "refine") == EXIT_OK
    run_dir = tmp_path / "lambda-star" / "refine"

    extremal = json.loads((run_dir / "extremal.json").read_text())
    assert [row["M"] for row in extremal["rows"]] == [64, 128]
    assert all(row["regular_on_mesh"] for row in extremal["rows"])
    branches = json.loads((run_dir / "branch.json").read_text())
    assert all(entry["lower_bound"] <= entry["lambda_lo"] for entry in branches)


@pytest.mark.timeout(900)
def test_branch_run_writes_energy_report(tmp_path):
    assert _run(tmp_path, "branch", "--n", "2", "--M", "64", "--tag", "branch") == EXIT_OK
    run_dir = tmp_path / "branch" / "branch"

    with (run_dir / "branch.csv").open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) >= 20
    assert rows[0]["lambda"] == "0"
    energy = json.loads((run_dir / "energy.json").read_text())
    assert energy["bounded"]


@pytest.mark.timeout(900)
def test_relative_extinction_lambdas(tmp_path):
    assert _run(tmp_path, "extinction", "--n", "3", "--M", "64", "--lambdas", "0.01x,0.001x", "--tag", "ext") == EXIT_OK
    reports = json.loads((tmp_path / "extinction" / "ext" / "extinction.json").read_text())
    assert reports[0]["lambda"] == pytest.approx(10.0 * reports[1]["lambda"])
    assert reports[1]["ratio_deviation"] < reports[0]["ratio_deviation"]


@pytest.mark.timeout(1800)
def test_sweep_over_dimensions(tmp_path):
    assert _run(tmp_path, "sweep", "--n", "1..3", "--M", "64", "--workers", "2", "--tag", "sweep") == EXIT_OK
    run_dir = tmp_path / "sweep" / "sweep"

    for n in (1, 2, 3):
        row = json.loads((run_dir / f"n{n:02d}.json").read_text())
        assert row["status"] == "ok"
        assert row["lower_bound"] <= row["lambda_lo"]
        assert row["regular_verdict"]
        assert row["termination"] == "fold"
    with (run_dir / "sweep.csv").open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert [row["n"] for row in rows] == ["1", "2", "3"]
    assert {row["termination"] for row in rows} == {"fold"}
