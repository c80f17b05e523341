"""Contract tests for run outputs.

Validates that the serialized pydantic models and CSV headers match the
schema registry in specs/001-radial-extremal-solver/contracts/outputs-schema.yaml.
Only the solve-based test runs the numerics, on a coarse mesh.
"""

import csv
import json
import pathlib
from datetime import datetime, timezone

import pytest
import yaml

from src.branch.models import BranchTermination, ExtinctionReport, SolveMethod, SolveSummary
from src.certificates.models import CertificateKind, CertificateReport, Verdict
from src.cli import main as cli
from src.cli.models import BranchSummary, Diagnostic, EigenSummary, RunManifest, SandwichRow, SweepRow, SweepStatus
from src.cli.output import MANIFEST_NAME, to_jsonable
from src.common.config import ProblemConfig

SCHEMA_PATH = pathlib.Path("specs/001-radial-extremal-solver/contracts/outputs-schema.yaml")
JSON_TYPES = {
    "integer": (int,),
    "number": (int, float),
    "string": (str,),
    "boolean": (bool,),
    "array": (list,),
    "object": (dict,),
}


def load_contract():
    return yaml.safe_load(SCHEMA_PATH.read_text())


def load_schemas():
    return load_contract()["components"]["schemas"]


def assert_matches(schema_name, payload):
    schema = load_schemas()[schema_name]
    properties = schema.get("properties", {})
    assert set(schema.get("required", [])).issubset(payload.keys())
    assert set(payload.keys()).issubset(properties.keys())
    for key, value in payload.items():
        spec = properties[key]
        if value is None:
            assert spec.get("nullable", False), f"{schema_name}.{key} is not nullable"
            continue
        if "type" in spec:
            assert isinstance(value, JSON_TYPES[spec["type"]]), f"{schema_name}.{key}"
            if spec["type"] in ("integer", "number"):
                assert not isinstance(value, bool)
        if "enum" in spec:
            assert value in spec["enum"], f"{schema_name}.{key}={value}"


# =============================================================================
# Model shapes
# =============================================================================


def test_solve_summary_contract():
    summary = SolveSummary(
        n=3,
        p=1.0,
        M=64,
        lam=15.0,
        method=SolveMethod.NEWTON,
        mu1=120.0,
        sup_norm=0.1,
        residual=1e-12,
        iterations=4,
        min_u_minus_v=0.01,
    )
    assert_matches("SolveSummary", to_jsonable(summary))


def test_branch_summary_contract():
    summary = BranchSummary(
        n=3,
        p=1.0,
        M=64,
        lambda_lo=40.0,
        lambda_hi=40.00004,
        lambda_star=40.00002,
        lower_bound=30.0,
        upper_bound=50.0,
        nu1=200.0,
        u_star_sup=0.4,
        regular_on_mesh=True,
        fold_signal_lambda=None,
        extrapolation_pair=[39.9, 40.0],
        termination=BranchTermination.FOLD,
        u_star_mu1=1e-11,
        points=30,
    )
    assert_matches("BranchSummary", to_jsonable(summary))


def test_termination_values_match_contract():
    schemas = load_schemas()
    values = [termination.value for termination in BranchTermination]
    assert schemas["BranchSummary"]["properties"]["termination"]["enum"] == values
    assert schemas["SweepRow"]["properties"]["termination"]["enum"] == values


def test_eigen_summary_contract():
    beam = EigenSummary(n=1, M=64, nu1=31.3, upper_bound=7.8, iterations=5, residual=1e-11, beam_nu1=31.285, beam_relative_error=1e-4)
    ball = EigenSummary(n=3, M=64, nu1=200.0, upper_bound=50.0, iterations=5, residual=1e-11)
    assert_matches("EigenSummary", to_jsonable(beam))
    assert_matches("EigenSummary", to_jsonable(ball))


def test_table_rows_contract():
    sandwich = SandwichRow(n=3, M=64, p=1.0, lower_bound=30.0, lambda_lo=40.0, lambda_hi=40.1, nu1=200.0, upper_bound=50.0, holds=True)
    assert_matches("SandwichRow", to_jsonable(sandwich))

    failed = SweepRow(n=11, M=64, p=1.0, status=SweepStatus.TIMEOUT, lower_bound=396.0, error="timed out")
    assert_matches("SweepRow", to_jsonable(failed))

    finished = SweepRow(
        n=8,
        M=64,
        p=1.0,
        status=SweepStatus.OK,
        lambda_star=200.0,
        lambda_lo=199.9,
        lambda_hi=200.1,
        upper_bound=300.0,
        lower_bound=192.0,
        u_star_sup=0.99,
        regular_verdict=False,
        mu1_over_nu1=0.5,
        termination=BranchTermination.CEILING,
    )
    payload = to_jsonable(finished)
    assert_matches("SweepRow", payload)
    assert payload["termination"] == "ceiling"

    extinction = ExtinctionReport(
        n=3,
        p=1.0,
        M=64,
        lam=0.3,
        lambda_limit=30.0,
        ratio_deviation=0.01,
        min_u_minus_v=1e-6,
        u_sup=0.0008,
        v_sup=0.0007,
        iterations=6,
    )
    assert_matches("ExtinctionReport", to_jsonable(extinction))


def test_certificate_report_contract():
    report = CertificateReport(
        kind=CertificateKind.G_BETA,
        n=4,
        M=256,
        verdict=Verdict.PASS,
        margin=1.0,
        tolerance=0.1,
        scale=10.0,
        nodes_checked=[13, 255],
        r_range=[0.05, 0.996],
        derived_bound=32.0,
        details={"c0": 0.25},
    )
    payload = to_jsonable(report)
    assert_matches("CertificateReport", payload)
    assert payload["kind"] == "g_beta"


def test_manifest_and_diagnostic_contract():
    now = datetime(2026, 1, 1, tzinfo=timezone.utc)
    config = ProblemConfig(n=3, M=64).to_dict()
    manifest = RunManifest(
        software_version="0.1.0",
        command="solve",
        tag="demo",
        argv=["solve"],
        config=config,
        started_at=now,
        finished_at=now,
        exit_code=0,
    )
    assert_matches("RunManifest", manifest.model_dump(mode="json"))
    assert_matches("ProblemConfig", config)
    assert_matches("Diagnostic", to_jsonable(Diagnostic(error_type="RuntimeError", message="boom")))


def test_csv_headers_match_writers():
    headers = load_contract()["x-csv-headers"]
    assert headers["solution.csv"] == list(cli.SOLUTION_HEADER)
    assert headers["branch.csv"] == list(cli.BRANCH_HEADER)
    assert headers["refinement.csv"] == list(cli.REFINEMENT_HEADER)
    assert headers["bounds.csv"] == list(cli.SANDWICH_HEADER)
    assert headers["extinction.csv"] == list(cli.EXTINCTION_HEADER)
    assert headers["certificates.csv"] == list(cli.CERTIFICATE_HEADER)
    assert headers["sweep.csv"] == list(cli.SWEEP_HEADER)


def test_certificate_kinds_and_verdicts_match_contract():
    schema = load_schemas()["CertificateReport"]["properties"]
    assert schema["kind"]["enum"] == [kind.value for kind in CertificateKind]
    assert schema["verdict"]["enum"] == [verdict.value for verdict in Verdict]


# =============================================================================
# Files on disk
# =============================================================================


@pytest.mark.timeout(120)
def test_solve_run_directory_matches_contract(tmp_path):
    assert cli.main(["solve", "--n", "3", "--M", "32", "--lambda", "10", "--tag", "contract", "--output-dir", str(tmp_path)]) == 0
    run_dir = tmp_path / "solve" / "contract"

    assert_matches("SolveSummary", json.loads((run_dir / "summary.json").read_text()))
    manifest = json.loads((run_dir / MANIFEST_NAME).read_text())
    assert_matches("RunManifest", manifest)
    assert manifest["command"] in load_schemas()["RunManifest"]["properties"]["command"]["enum"]
    for name in manifest["outputs"]:
        assert (run_dir / name).exists()

    with (run_dir / "solution.csv").open(newline="") as handle:
        header = next(csv.reader(handle))
    assert header == load_contract()["x-csv-headers"]["solution.csv"]
