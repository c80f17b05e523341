"""clampfold command-line front-end.

Subcommands: solve, branch, lambda-star, eigen, bounds, extinction, certify, sweep.

Exit codes:
    0: success; certificate verdicts, including fail, are results
    1: invalid flags or configuration
    2: a nonlinear solve failed at the requested lambda (evidence that lambda >= lambda*)
    3: any other failure; a diagnostic JSON goes to stdout and the run directory
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FuturesTimeoutError
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

import numpy as np

from src.cli import __version__
from src.cli.models import BranchSummary, Diagnostic, EigenSummary, SandwichRow, SweepRow, SweepStatus
from src.cli.output import RunWriter, to_jsonable
from src.common.config import (
    ConfigError,
    ProblemConfig,
    RuntimeSettings,
    load_config_file,
    load_problem_config,
    load_runtime_settings,
)
from src.common.logging import configure, get_logger, log_error, log_event
from src.branch.continuation import continue_branch
from src.branch.models import BranchSolveError, ContinuationResult, SolveSummary
from src.branch.reports import extinction_check, extremal_report, h02_norm_bound_check
from src.branch.solvers import monotone_solve, newton_solve, nonlinearity
from src.certificates.bounds import lower_bound, upper_bound
from src.certificates.checks import (
    check_g_beta,
    check_omega_alpha,
    check_singular_profile,
    check_singularity_certificate,
    upper_bound_check,
)
from src.certificates.models import CertificateKind, CertificateReport, CertificateSpec
from src.discretization.mesh import build_mesh
from src.discretization.models import DiscreteBiharmonic, RadialField
from src.discretization.operator import assemble_biharmonic
from src.linalg.banded import factor, solve_linear
from src.spectral.eigen import beam_oracle, nu1

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_SOLUTION = 2
EXIT_INTERNAL = 3

# Longest first so "xλ*" is not read as "x".
RELATIVE_SUFFIXES = ("×λ*", "xλ*", "xlambda*", "×", "x")
SWEEP_DEFAULT_DIMENSIONS = "1..12"
UPPER_ALLOWANCE_STEPS = 10.0

SOLUTION_HEADER = ("r", "u", "V_lambda", "u_minus_V")
BRANCH_HEADER = ("lambda", "sup_norm", "mu1", "residual", "method", "iterations")
REFINEMENT_HEADER = (
    "M",
    "lambda_lo",
    "lambda_hi",
    "u_star_sup",
    "regular_on_mesh",
    "mu1_last",
    "nu1",
    "mu1_over_nu1",
    "u_star_mu1",
    "termination",
    "points",
)
SANDWICH_HEADER = ("n", "M", "p", "lower_bound", "lambda_lo", "lambda_hi", "nu1", "upper_bound", "holds")
EXTINCTION_HEADER = ("lambda", "ratio_deviation", "min_u_minus_v", "u_sup", "v_sup", "iterations")
CERTIFICATE_HEADER = ("kind", "n", "p", "M", "verdict", "margin", "tolerance", "derived_bound")
SWEEP_HEADER = (
    "n",
    "M",
    "p",
    "status",
    "lambda_star",
    "lambda_lo",
    "lambda_hi",
    "upper_bound",
    "lower_bound",
    "u_star_sup",
    "regular_verdict",
    "mu1_over_nu1",
    "termination",
)


class UsageError(Exception):
    """Invalid command-line flags."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


# ============================================================================
# Flag parsing
# ============================================================================


def parse_int_list(text: str) -> List[int]:
    """Parse "a..b", "a,b,c" or a mix such as "1..4,8"."""
    values: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"Empty entry in list '{text}'")
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                start, stop = int(lo), int(hi)
                if stop < start:
                    raise UsageError(f"Empty range '{part}'")
                values.extend(range(start, stop + 1))
            else:
                values.append(int(part))
        except ValueError as exc:
            raise UsageError(f"Invalid integer list '{text}'") from exc
    return values


@dataclass(frozen=True)
class LambdaValue:
    """A lambda flag: absolute, or a multiple of a freshly computed lambda*."""

    value: float
    relative: bool
    text: str

    def resolve(self, lambda_star: Optional[float]) -> float:
        if not self.relative:
            return self.value
        if lambda_star is None:
            raise UsageError(f"'{self.text}' needs lambda*")
        return self.value * lambda_star


def parse_lambda(text: str) -> LambdaValue:
    raw = text.strip()
    relative = False
    for suffix in RELATIVE_SUFFIXES:
        if raw.endswith(suffix):
            raw = raw[: -len(suffix)].strip()
            relative = True
            break
    try:
        value = float(raw)
    except ValueError as exc:
        raise UsageError(f"Invalid lambda '{text}'") from exc
    if not np.isfinite(value):
        raise UsageError(f"lambda must be finite, got '{text}'")
    return LambdaValue(value=value, relative=relative, text=text)


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"Invalid number list '{text}'") from exc


def _common_flags() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--n", help="Dimension, range a..b or comma list.")
    common.add_argument("--M", help="Mesh intervals, range or comma list.")
    common.add_argument("--p", type=float, help="Exponent of (1 - u)^-p.")
    common.add_argument("--config", type=Path, help="YAML file of ProblemConfig overrides.")
    common.add_argument("--output-dir", type=Path, help="Root of run directories (default $CLAMPFOLD_OUTPUT_DIR).")
    common.add_argument("--tag", help="Run directory name (default derived from the flags).")
    common.add_argument("--tol-newton", type=float)
    common.add_argument("--tol-eig", type=float)
    common.add_argument("--tol-fold", type=float)
    common.add_argument("--log-level", help="Overrides $CLAMPFOLD_LOG_LEVEL.")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="clampfold", description="Radial clamped biharmonic problem with singular nonlinearity.")
    parser.add_argument("--version", action="version", version=f"clampfold {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    solve = subparsers.add_parser("solve", parents=[common], help="Minimal solution at one lambda.")
    solve.add_argument("--lambda", dest="lam", required=True, help="lambda, or a multiple of lambda* with an x suffix.")
    solve.add_argument("--method", choices=["monotone", "newton"], default="monotone")

    subparsers.add_parser("branch", parents=[common], help="Trace the minimal branch to the fold.")
    subparsers.add_parser("lambda-star", parents=[common], help="lambda* bracket and mesh-refinement table.")
    subparsers.add_parser("eigen", parents=[common], help="First clamped eigenvalue and eigenfunction.")
    subparsers.add_parser("bounds", parents=[common], help="lower_bound <= lambda* <= nu1/c_p per n.")

    extinction = subparsers.add_parser("extinction", parents=[common], help="Deviation of u from V_lambda as lambda -> 0.")
    extinction.add_argument("--lambdas", required=True, help="Comma list; an x suffix makes an entry relative to lambda*.")

    certify = subparsers.add_parser("certify", parents=[common], help="Discrete certificate checks.")
    certify.add_argument("--kind", required=True, choices=[kind.value for kind in CertificateKind])
    certify.add_argument("--alpha", default="0.5", help="omega_alpha amplitude, or a comma list for a scan.")
    certify.add_argument("--c0", type=float, default=0.25)
    certify.add_argument("--amplitude", type=float, default=2.0)
    certify.add_argument("--beta-exp", type=float, default=0.5)
    certify.add_argument("--r-min", type=float, help="Exclusion radius (default r_min_certificate).")
    certify.add_argument("--omega", choices=["zero", "power"], help="Built-in singularity candidate.")
    certify.add_argument("--omega-c", type=float, default=1.0, help="c in omega = 1 - c r^(4/(p+1)).")
    certify.add_argument("--omega-csv", type=Path, help="CSV with columns r,omega sampled on the mesh.")
    certify.add_argument("--lambda-prime", type=float, help="lambda' of the singularity certificate.")
    certify.add_argument("--beta-claim", type=float)

    sweep = subparsers.add_parser("sweep", parents=[common], help="lambda*, sup u* and regularity for a range of n.")
    sweep.add_argument("--workers", type=int, help="Concurrent dimensions (default $CLAMPFOLD_SWEEP_WORKERS).")
    return parser


# ============================================================================
# Command context
# ============================================================================


def operator_for(config: ProblemConfig) -> DiscreteBiharmonic:
    return assemble_biharmonic(build_mesh(config.M), config.n)


@dataclass
class CommandContext:
    args: argparse.Namespace
    settings: RuntimeSettings
    base_config: ProblemConfig
    writer: RunWriter
    dimensions: List[int]
    meshes: List[int]
    used_dimensions: List[int] = field(default_factory=list)
    used_meshes: List[int] = field(default_factory=list)
    _branches: Dict[Tuple[int, int], ContinuationResult] = field(default_factory=dict)

    def config_for(self, n: int, M: int) -> ProblemConfig:
        self.used_dimensions.append(n)
        self.used_meshes.append(M)
        return self.base_config.with_overrides(n=n, M=M)

    def single_dimension(self) -> int:
        if len(self.dimensions) != 1:
            raise UsageError(f"{self.args.command} takes a single --n, got {self.dimensions}")
        return self.dimensions[0]

    def single_mesh(self) -> int:
        if len(self.meshes) != 1:
            raise UsageError(f"{self.args.command} takes a single --M, got {self.meshes}")
        return self.meshes[0]

    def branch(self, n: int, M: int) -> ContinuationResult:
        key = (n, M)
        if key not in self._branches:
            config = self.config_for(n, M)
            self._branches[key] = continue_branch(operator_for(config), config)
        return self._branches[key]

    def resolve_lambda(self, value: LambdaValue, n: int, M: int) -> float:
        return value.resolve(self.branch(n, M).lambda_star if value.relative else None)


def _base_config(args: argparse.Namespace) -> Tuple[ProblemConfig, List[int], List[int]]:
    overrides = load_config_file(args.config) if args.config else {}
    dimensions = parse_int_list(args.n) if args.n else None
    meshes = parse_int_list(args.M) if args.M else None
    flags = {
        "n": dimensions[0] if dimensions else None,
        "M": meshes[0] if meshes else None,
        "p": args.p,
        "tol_newton": args.tol_newton,
        "tol_eig": args.tol_eig,
        "tol_fold": args.tol_fold,
    }
    overrides.update({key: value for key, value in flags.items() if value is not None})
    config = load_problem_config(**overrides)
    if dimensions is None:
        dimensions = parse_int_list(SWEEP_DEFAULT_DIMENSIONS) if args.command == "sweep" else [config.n]
    for n in dimensions:
        config.with_overrides(n=n)
    for M in meshes or []:
        config.with_overrides(M=M)
    return config, dimensions, meshes or [config.M]


def _default_tag(args: argparse.Namespace, config: ProblemConfig) -> str:
    parts = [f"n{args.n or config.n}", f"M{args.M or config.M}", f"p{config.p:g}"]
    if args.command == "solve":
        parts.append(f"lambda{args.lam}-{args.method}")
    elif args.command == "extinction":
        parts.append(f"lambdas{args.lambdas}")
    elif args.command == "certify":
        parts.append(args.kind)
    return "-".join(parts)


# ============================================================================
# Commands
# ============================================================================


def cmd_solve(ctx: CommandContext) -> int:
    n, M = ctx.single_dimension(), ctx.single_mesh()
    lam = ctx.resolve_lambda(parse_lambda(ctx.args.lam), n, M)
    if lam < 0:
        raise UsageError(f"lambda must be >= 0, got {lam}")
    config = ctx.config_for(n, M)
    op = operator_for(config)
    base = factor(op)
    if ctx.args.method == "newton":
        point = newton_solve(op, lam, np.zeros(op.size), config, base=base)
    else:
        point = monotone_solve(op, lam, config, base=base)

    u = point.u.values
    nodes = op.mesh.nodes
    profile = lam * (1.0 - nodes**2) ** 2 / (8.0 * n * (n + 2.0))
    gap = solve_linear(base, lam * (nonlinearity(u, config.p) - 1.0)).values
    ctx.writer.write_csv("solution.csv", SOLUTION_HEADER, zip(nodes, u, profile, gap))
    summary = SolveSummary(
        n=n,
        p=config.p,
        M=M,
        lam=lam,
        method=point.method,
        mu1=point.mu1,
        sup_norm=point.sup_norm,
        residual=point.residual,
        iterations=point.iterations,
        min_u_minus_v=float(np.min(gap[:-1])),
    )
    ctx.writer.write_json("summary.json", summary)
    print(json.dumps(to_jsonable(summary), sort_keys=True))
    return EXIT_OK


def _branch_summary(result: ContinuationResult) -> BranchSummary:
    config = result.config
    return BranchSummary(
        n=config.n,
        p=config.p,
        M=config.M,
        lambda_lo=result.lambda_lo,
        lambda_hi=result.lambda_hi,
        lambda_star=result.lambda_star,
        lower_bound=lower_bound(config.n, config.p),
        upper_bound=upper_bound(result.nu1, config.p),
        nu1=result.nu1,
        u_star_sup=result.u_star_sup,
        regular_on_mesh=result.regular_verdict,
        fold_signal_lambda=result.fold_signal_lambda,
        extrapolation_pair=list(result.extrapolation_pair),
        termination=result.termination,
        u_star_mu1=result.u_star_mu1,
        points=len(result.points),
    )


def cmd_branch(ctx: CommandContext) -> int:
    result = ctx.branch(ctx.single_dimension(), ctx.single_mesh())
    rows = [(pt.lam, pt.sup_norm, pt.mu1, pt.residual, pt.method.value, pt.iterations) for pt in result.points]
    ctx.writer.write_csv("branch.csv", BRANCH_HEADER, rows)
    ctx.writer.write_csv("u_star.csv", ("r", "u_star"), zip(result.op.mesh.nodes, result.u_star.values))
    summary = _branch_summary(result)
    ctx.writer.write_json("branch.json", summary)
    ctx.writer.write_json("energy.json", h02_norm_bound_check(result))
    print(json.dumps(to_jsonable(summary), sort_keys=True))
    return EXIT_OK


def cmd_lambda_star(ctx: CommandContext) -> int:
    n = ctx.single_dimension()
    results = [ctx.branch(n, M) for M in ctx.meshes]
    report = extremal_report(results, ctx.base_config.with_overrides(n=n))
    rows = [[getattr(row, column) for column in REFINEMENT_HEADER] for row in report.rows]
    ctx.writer.write_csv("refinement.csv", REFINEMENT_HEADER, rows)
    ctx.writer.write_json("extremal.json", report)
    ctx.writer.write_json("branch.json", [_branch_summary(result) for result in results])
    finest = report.rows[-1]
    print(
        json.dumps(
            {
                "n": n,
                "lambda_lo": finest.lambda_lo,
                "lambda_hi": finest.lambda_hi,
                "u_star_sup": finest.u_star_sup,
                "verdict": report.verdict.value,
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def cmd_eigen(ctx: CommandContext) -> int:
    n, M = ctx.single_dimension(), ctx.single_mesh()
    config = ctx.config_for(n, M)
    op = operator_for(config)
    pair = nu1(op, config)
    beam_nu1 = beam_oracle()[1] if n == 1 else None
    summary = EigenSummary(
        n=n,
        M=M,
        nu1=pair.value,
        upper_bound=upper_bound(pair.value, config.p),
        iterations=pair.iterations,
        residual=pair.residual,
        beam_nu1=beam_nu1,
        beam_relative_error=abs(pair.value - beam_nu1) / beam_nu1 if beam_nu1 else None,
    )
    ctx.writer.write_csv("eigenfunction.csv", ("r", "psi"), zip(op.mesh.nodes, pair.field.values))
    ctx.writer.write_json("eigen.json", summary)
    print(json.dumps(to_jsonable(summary), sort_keys=True))
    return EXIT_OK


def cmd_bounds(ctx: CommandContext) -> int:
    rows: List[SandwichRow] = []
    for n in ctx.dimensions:
        for M in ctx.meshes:
            result = ctx.branch(n, M)
            p = result.config.p
            lower = lower_bound(n, p)
            upper = upper_bound(result.nu1, p)
            h = result.op.mesh.h
            rows.append(
                SandwichRow(
                    n=n,
                    M=M,
                    p=p,
                    lower_bound=lower,
                    lambda_lo=result.lambda_lo,
                    lambda_hi=result.lambda_hi,
                    nu1=result.nu1,
                    upper_bound=upper,
                    holds=lower <= result.lambda_lo and result.lambda_hi <= upper * (1.0 + UPPER_ALLOWANCE_STEPS * h * h),
                )
            )
    ctx.writer.write_csv("bounds.csv", SANDWICH_HEADER, [[getattr(row, c) for c in SANDWICH_HEADER] for row in rows])
    ctx.writer.write_json("bounds.json", rows)
    print(json.dumps({"rows": len(rows), "all_hold": all(row.holds for row in rows)}, sort_keys=True))
    return EXIT_OK


def cmd_extinction(ctx: CommandContext) -> int:
    n, M = ctx.single_dimension(), ctx.single_mesh()
    values = [parse_lambda(part) for part in ctx.args.lambdas.split(",")]
    lambdas = [ctx.resolve_lambda(value, n, M) for value in values]
    config = ctx.config_for(n, M)
    op = operator_for(config)
    reports = [extinction_check(op, lam, config) for lam in lambdas]
    rows = [
        (r.lam, r.ratio_deviation, r.min_u_minus_v, r.u_sup, r.v_sup, r.iterations)
        for r in reports
    ]
    ctx.writer.write_csv("extinction.csv", EXTINCTION_HEADER, rows)
    ctx.writer.write_json("extinction.json", reports)
    print(json.dumps({"lambdas": lambdas, "ratio_deviation": [r.ratio_deviation for r in reports]}, sort_keys=True))
    return EXIT_OK


def _singularity_omega(ctx: CommandContext, op: DiscreteBiharmonic, p: float) -> RadialField:
    args = ctx.args
    nodes = op.mesh.nodes
    if args.omega_csv is not None:
        try:
            data = np.loadtxt(args.omega_csv, delimiter=",", skiprows=1, ndmin=2)
        except OSError as exc:
            raise ConfigError(f"Cannot read omega file {args.omega_csv}: {exc}") from exc
        if data.shape != (op.size, 2) or not np.allclose(data[:, 0], nodes, rtol=0.0, atol=1e-12):
            raise ConfigError(f"{args.omega_csv} must hold columns r,omega on the {op.M}-interval mesh")
        return RadialField(data[:, 1])
    if args.omega == "zero":
        return RadialField(np.zeros(op.size))
    if args.omega == "power":
        return RadialField(1.0 - args.omega_c * nodes ** (4.0 / (p + 1.0)))
    raise UsageError("--kind singularity needs --omega or --omega-csv")


def _certify_one(ctx: CommandContext, n: int, M: int) -> List[CertificateReport]:
    args = ctx.args
    config = ctx.config_for(n, M)
    op = operator_for(config)
    r_min = args.r_min if args.r_min is not None else config.r_min_certificate
    kind = CertificateKind(args.kind)
    if kind == CertificateKind.OMEGA_ALPHA:
        return [check_omega_alpha(CertificateSpec.omega_alpha(n, alpha, config.p), op) for alpha in parse_float_list(args.alpha)]
    if kind == CertificateKind.G_BETA:
        spec = CertificateSpec(
            kind=kind,
            n=n,
            p=config.p,
            c0=args.c0,
            amplitude=args.amplitude,
            beta_exp=args.beta_exp,
            r_min=r_min,
        )
        return [check_g_beta(spec, op)]
    if kind == CertificateKind.SINGULARITY:
        if args.lambda_prime is None:
            raise UsageError("--kind singularity needs --lambda-prime")
        omega = _singularity_omega(ctx, op, config.p)
        spec = CertificateSpec.singularity(
            n, omega, args.lambda_prime, p=config.p, beta_claim=args.beta_claim, r_min=r_min
        )
        return [check_singularity_certificate(spec, op, config)]
    if kind == CertificateKind.SINGULAR_PROFILE:
        return [check_singular_profile(op, config.p, r_min=r_min, config=config)]
    result = ctx.branch(n, M)
    return [upper_bound_check(result.op, nu1(result.op, config), result)]


def cmd_certify(ctx: CommandContext) -> int:
    M = ctx.single_mesh()
    reports: List[CertificateReport] = []
    for n in ctx.dimensions:
        reports.extend(_certify_one(ctx, n, M))
    rows = [[getattr(report, column) for column in CERTIFICATE_HEADER] for report in reports]
    ctx.writer.write_csv("certificates.csv", CERTIFICATE_HEADER, rows)
    ctx.writer.write_json("certificates.json", reports)
    print(json.dumps([{"n": r.n, "kind": r.kind.value, "verdict": r.verdict.value} for r in reports], sort_keys=True))
    return EXIT_OK


def _sweep_dimension(config: ProblemConfig, run_id: str) -> SweepRow:
    result = continue_branch(operator_for(config), config, run_id=run_id)
    return SweepRow(
        n=config.n,
        M=config.M,
        p=config.p,
        status=SweepStatus.OK,
        lambda_star=result.lambda_star,
        lambda_lo=result.lambda_lo,
        lambda_hi=result.lambda_hi,
        upper_bound=upper_bound(result.nu1, config.p),
        lower_bound=lower_bound(config.n, config.p),
        u_star_sup=result.u_star_sup,
        regular_verdict=result.regular_verdict,
        mu1_over_nu1=result.last.mu1 / result.nu1,
        termination=result.termination,
    )


def cmd_sweep(ctx: CommandContext) -> int:
    M = ctx.single_mesh()
    configs = [ctx.config_for(n, M) for n in ctx.dimensions]
    workers = ctx.args.workers or ctx.settings.sweep_workers
    if workers < 1:
        raise UsageError(f"--workers must be at least 1, got {workers}")
    timeout = ctx.settings.sweep_timeout_sec
    rows: List[SweepRow] = []

    executor = ThreadPoolExecutor(max_workers=min(workers, len(configs)))
    try:
        futures = [(config, executor.submit(_sweep_dimension, config, f"sweep_n{config.n}")) for config in configs]
        for config, future in futures:
            failed = dict(n=config.n, M=M, p=config.p, lower_bound=lower_bound(config.n, config.p))
            try:
                # Timed-out work keeps running in its thread; only the row is abandoned.
                row = future.result(timeout=timeout)
            except FuturesTimeoutError:
                row = SweepRow(**failed, status=SweepStatus.TIMEOUT, error=f"exceeded {timeout}s")
            except Exception as exc:
                log_error(logger, "sweep_dimension_failed", error=exc, n=config.n)
                row = SweepRow(**failed, status=SweepStatus.ERROR, error=f"{type(exc).__name__}: {exc}")
            ctx.writer.write_json(f"n{config.n:02d}.json", row)
            rows.append(row)
    finally:
        executor.shutdown(wait=False, cancel_futures=True)

    ctx.writer.write_csv("sweep.csv", SWEEP_HEADER, [[getattr(row, c) for c in SWEEP_HEADER] for row in rows])
    print(
        json.dumps(
            [
                {
                    "n": row.n,
                    "status": row.status.value,
                    "regular_verdict": row.regular_verdict,
                    "termination": row.termination.value if row.termination else None,
                }
                for row in rows
            ],
            sort_keys=True,
        )
    )
    return EXIT_OK


COMMANDS: Dict[str, Callable[[CommandContext], int]] = {
    "solve": cmd_solve,
    "branch": cmd_branch,
    "lambda-star": cmd_lambda_star,
    "eigen": cmd_eigen,
    "bounds": cmd_bounds,
    "extinction": cmd_extinction,
    "certify": cmd_certify,
    "sweep": cmd_sweep,
}


# ============================================================================
# Entry point
# ============================================================================


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        settings = load_runtime_settings()
        configure(args.log_level or settings.log_level)
        base_config, dimensions, meshes = _base_config(args)
    except (UsageError, ConfigError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE

    writer = RunWriter(args.output_dir or settings.output_dir, args.command, args.tag or _default_tag(args, base_config))
    ctx = CommandContext(
        args=args,
        settings=settings,
        base_config=base_config,
        writer=writer,
        dimensions=dimensions,
        meshes=meshes,
    )
    log_event(logger, "command_started", command=args.command, run_dir=str(writer.directory))
    try:
        exit_code = COMMANDS[args.command](ctx)
    except (UsageError, ConfigError) as exc:
        print(str(exc), file=sys.stderr)
        exit_code = EXIT_USAGE
    except BranchSolveError as exc:
        payload = {"error_type": type(exc).__name__, "message": str(exc), "lambda": exc.lam, "reason": exc.reason}
        writer.write_json("no_solution.json", payload)
        print(json.dumps(payload, sort_keys=True))
        exit_code = EXIT_NO_SOLUTION
    except Exception as exc:
        diagnostic = Diagnostic(
            error_type=type(exc).__name__,
            message=str(exc),
            command=args.command,
            config=base_config.to_dict(),
        )
        writer.write_diagnostic(diagnostic)
        print(json.dumps(to_jsonable(diagnostic), sort_keys=True))
        log_error(logger, "command_failed", error=exc, command=args.command)
        exit_code = EXIT_INTERNAL

    writer.finish(
        software_version=__version__,
        argv=argv,
        config=base_config.to_dict(),
        exit_code=exit_code,
        meshes=ctx.used_meshes,
        dimensions=ctx.used_dimensions,
    )
    log_event(logger, "command_finished", command=args.command, exit_code=exit_code)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
