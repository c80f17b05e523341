"""Configuration loader for clampfold runs.

Provides the problem configuration dataclass and environment variable helpers
used by the solver modules and the command-line front-end.

Exports:
    - ConfigError: Exception for configuration errors
    - _get_env, _int_env, _float_env, _optional_env: Environment helpers
    - ProblemConfig: Dimension, exponent, mesh and tolerances of one run
    - RuntimeSettings: Output directory, log level, sweep workers and timeout
    - load_problem_config: Load a validated ProblemConfig from env + overrides
    - load_config_file: Read YAML overrides for ProblemConfig
    - load_runtime_settings: Load RuntimeSettings from environment
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml


class ConfigError(Exception):
    """Raised when required configuration is missing or invalid."""


def _get_env(key: str, default: Optional[str] = None, required: bool = False) -> str:
    value = os.getenv(key, default)
    if required and (value is None or value == ""):
        raise ConfigError(f"Missing required environment variable: {key}")
    if value is None:
        raise ConfigError(f"Environment variable {key} is not set and no default provided")
    if value == "" and default is None:
        raise ConfigError(f"Environment variable {key} is empty and no default provided")
    return value


def _int_env(key: str, default: int) -> int:
    raw = os.getenv(key)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"Invalid int for {key}: {raw}") from exc


def _float_env(key: str, default: float) -> float:
    raw = os.getenv(key)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"Invalid float for {key}: {raw}") from exc


def _optional_env(key: str) -> Optional[str]:
    value = os.getenv(key)
    if value is None or value == "":
        return None
    return value


# ============================================================================
# Problem configuration
# ============================================================================

MIN_MESH_INTERVALS = 16

DEFAULT_DIMENSION = 3
DEFAULT_EXPONENT = 1.0
DEFAULT_MESH_INTERVALS = 256
DEFAULT_R_MIN_CERTIFICATE = 0.05
DEFAULT_TOL_NEWTON = 1e-10
DEFAULT_TOL_EIG = 1e-10
DEFAULT_TOL_FOLD = 1e-6
DEFAULT_MAX_NEWTON_ITERATIONS = 50
DEFAULT_MAX_MONOTONE_ITERATIONS = 2000
DEFAULT_MAX_EIGEN_ITERATIONS = 1000
DEFAULT_INITIAL_STEP_FRACTION = 0.02
DEFAULT_DAMPING_MARGIN = 1e-6
DEFAULT_BLOWUP_MARGIN = 1e-3


@dataclass(frozen=True)
class ProblemConfig:
    """Single source of run parameters.

    Attributes:
        n: Spatial dimension of the ball.
        p: Exponent of the singular nonlinearity (1 - u)^(-p).
        M: Number of uniform mesh intervals on [0, 1].
        r_min_certificate: Exclusion radius for log/power-singular certificate checks.
        tol_newton: Solution-space residual tolerance for nonlinear solves.
        tol_eig: Residual tolerance for inverse iteration.
        tol_fold: Relative width of the final lambda-star bracket.
        max_newton_iterations: Newton iteration cap.
        max_monotone_iterations: Monotone iteration cap.
        max_eigen_iterations: Inverse iteration cap.
        initial_step_fraction: First continuation step as a fraction of lower_bound(n).
        damping_margin: Newton steps may not push sup u above 1 - damping_margin.
        blowup_margin: Monotone iterates reaching 1 - blowup_margin signal no solution.
    """

    n: int = DEFAULT_DIMENSION
    p: float = DEFAULT_EXPONENT
    M: int = DEFAULT_MESH_INTERVALS
    r_min_certificate: float = DEFAULT_R_MIN_CERTIFICATE
    tol_newton: float = DEFAULT_TOL_NEWTON
    tol_eig: float = DEFAULT_TOL_EIG
    tol_fold: float = DEFAULT_TOL_FOLD
    max_newton_iterations: int = DEFAULT_MAX_NEWTON_ITERATIONS
    max_monotone_iterations: int = DEFAULT_MAX_MONOTONE_ITERATIONS
    max_eigen_iterations: int = DEFAULT_MAX_EIGEN_ITERATIONS
    initial_step_fraction: float = DEFAULT_INITIAL_STEP_FRACTION
    damping_margin: float = DEFAULT_DAMPING_MARGIN
    blowup_margin: float = DEFAULT_BLOWUP_MARGIN

    def validate(self) -> "ProblemConfig":
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"Dimension n must be an integer >= 1, got {self.n}")
        if int(self.M) != self.M or self.M < MIN_MESH_INTERVALS:
            raise ConfigError(f"Mesh intervals M must be an integer >= {MIN_MESH_INTERVALS}, got {self.M}")
        if not self.p > 0:
            raise ConfigError(f"Exponent p must be positive, got {self.p}")
        if not 0.0 < self.r_min_certificate < 1.0:
            raise ConfigError(f"r_min_certificate must lie in (0, 1), got {self.r_min_certificate}")
        for name in ("tol_newton", "tol_eig", "tol_fold", "initial_step_fraction", "damping_margin", "blowup_margin"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        for name in ("max_newton_iterations", "max_monotone_iterations", "max_eigen_iterations"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
        return self

    @property
    def h(self) -> float:
        return 1.0 / self.M

    def with_overrides(self, **overrides: Any) -> "ProblemConfig":
        """Return a validated copy with the given fields replaced."""
        unknown = set(overrides) - _FIELD_NAMES
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")
        return replace(self, **overrides).validate()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_FIELD_NAMES = {f.name for f in fields(ProblemConfig)}

_ENV_KEYS = {
    "n": ("CLAMPFOLD_DIMENSION", int),
    "p": ("CLAMPFOLD_EXPONENT", float),
    "M": ("CLAMPFOLD_MESH_INTERVALS", int),
    "r_min_certificate": ("CLAMPFOLD_R_MIN_CERTIFICATE", float),
    "tol_newton": ("CLAMPFOLD_TOL_NEWTON", float),
    "tol_eig": ("CLAMPFOLD_TOL_EIG", float),
    "tol_fold": ("CLAMPFOLD_TOL_FOLD", float),
    "max_newton_iterations": ("CLAMPFOLD_MAX_NEWTON_ITERATIONS", int),
    "max_monotone_iterations": ("CLAMPFOLD_MAX_MONOTONE_ITERATIONS", int),
    "max_eigen_iterations": ("CLAMPFOLD_MAX_EIGEN_ITERATIONS", int),
}


def load_problem_config(**overrides: Any) -> ProblemConfig:
    """Load ProblemConfig from CLAMPFOLD_* environment variables plus explicit overrides.

    Explicit overrides win over the environment; ``None`` overrides are ignored.
    """
    values: Dict[str, Any] = {}
    defaults = ProblemConfig()
    for name, (key, kind) in _ENV_KEYS.items():
        default = getattr(defaults, name)
        values[name] = _int_env(key, default) if kind is int else _float_env(key, default)
    for name, value in overrides.items():
        if value is None:
            continue
        if name not in _FIELD_NAMES:
            raise ConfigError(f"Unknown configuration key: {name}")
        values[name] = value
    return ProblemConfig(**values).validate()


def load_config_file(path: str | Path) -> Dict[str, Any]:
    """Read a YAML mapping of ProblemConfig overrides."""
    file_path = Path(path)
    try:
        data = yaml.safe_load(file_path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"Config file not found: {file_path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"Invalid YAML in {file_path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {file_path} must contain a mapping")
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"Unknown configuration keys in {file_path}: {sorted(unknown)}")
    return dict(data)


# ============================================================================
# Runtime settings
# ============================================================================

DEFAULT_OUTPUT_DIR = "clampfold-runs"
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_SWEEP_WORKERS = 4
DEFAULT_SWEEP_TIMEOUT_SEC = 900.0


@dataclass
class RuntimeSettings:
    """Process-level settings that do not affect numerical results."""

    output_dir: Path
    log_level: str
    sweep_workers: int
    sweep_timeout_sec: float = DEFAULT_SWEEP_TIMEOUT_SEC


def load_runtime_settings() -> RuntimeSettings:
    workers = _int_env("CLAMPFOLD_SWEEP_WORKERS", DEFAULT_SWEEP_WORKERS)
    if workers < 1:
        raise ConfigError(f"CLAMPFOLD_SWEEP_WORKERS must be at least 1, got {workers}")
    timeout = _float_env("CLAMPFOLD_SWEEP_TIMEOUT_SEC", DEFAULT_SWEEP_TIMEOUT_SEC)
    if not timeout > 0:
        raise ConfigError(f"CLAMPFOLD_SWEEP_TIMEOUT_SEC must be positive, got {timeout}")
    return RuntimeSettings(
        output_dir=Path(_get_env("CLAMPFOLD_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)),
        log_level=(_optional_env("CLAMPFOLD_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper(),
        sweep_workers=workers,
        sweep_timeout_sec=timeout,
    )
