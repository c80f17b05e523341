import pytest

from src.common.config import (
    DEFAULT_SWEEP_WORKERS,
    ConfigError,
    ProblemConfig,
    load_config_file,
    load_problem_config,
    load_runtime_settings,
)

ENV_KEYS = (
    "CLAMPFOLD_DIMENSION",
    "CLAMPFOLD_EXPONENT",
    "CLAMPFOLD_MESH_INTERVALS",
    "CLAMPFOLD_TOL_NEWTON",
    "CLAMPFOLD_SWEEP_WORKERS",
    "CLAMPFOLD_SWEEP_TIMEOUT_SEC",
    "CLAMPFOLD_OUTPUT_DIR",
    "CLAMPFOLD_LOG_LEVEL",
)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


def test_defaults_validate():
    config = load_problem_config()
    assert config == ProblemConfig()
    assert config.n == 3
    assert config.p == 1.0
    assert config.M == 256
    assert config.h == pytest.approx(1.0 / 256)


def test_env_overrides_and_explicit_overrides_win(monkeypatch):
    monkeypatch.setenv("CLAMPFOLD_DIMENSION", "5")
    monkeypatch.setenv("CLAMPFOLD_MESH_INTERVALS", "128")
    monkeypatch.setenv("CLAMPFOLD_TOL_NEWTON", "1e-9")

    config = load_problem_config(M=64, p=None)

    assert config.n == 5
    assert config.M == 64
    assert config.tol_newton == 1e-9
    assert config.p == 1.0


def test_invalid_env_value_raises(monkeypatch):
    monkeypatch.setenv("CLAMPFOLD_MESH_INTERVALS", "many")
    with pytest.raises(ConfigError, match="Invalid int for CLAMPFOLD_MESH_INTERVALS"):
        load_problem_config()


@pytest.mark.parametrize(
    "overrides",
    [
        {"M": 8},
        {"n": 0},
        {"p": 0.0},
        {"tol_eig": -1.0},
        {"r_min_certificate": 1.5},
        {"max_newton_iterations": 0},
    ],
)
def test_invalid_values_raise(overrides):
    with pytest.raises(ConfigError):
        load_problem_config(**overrides)


def test_unknown_override_raises():
    with pytest.raises(ConfigError, match="Unknown configuration key"):
        load_problem_config(mesh=64)
    with pytest.raises(ConfigError):
        ProblemConfig().with_overrides(mesh=64)


def test_with_overrides_returns_validated_copy():
    base = ProblemConfig()
    changed = base.with_overrides(n=8, M=32)
    assert (changed.n, changed.M) == (8, 32)
    assert base.n == 3
    assert changed.to_dict()["n"] == 8


def test_load_config_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("M: 64\ntol_fold: 1.0e-5\n")
    assert load_config_file(path) == {"M": 64, "tol_fold": 1e-5}

    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config_file(empty) == {}


@pytest.mark.parametrize(
    "content, message",
    [
        ("mesh: 64\n", "Unknown configuration keys"),
        ("- 1\n- 2\n", "must contain a mapping"),
        ("M: [1, 2\n", "Invalid YAML"),
    ],
)
def test_load_config_file_rejects_bad_files(tmp_path, content, message):
    path = tmp_path / "bad.yaml"
    path.write_text(content)
    with pytest.raises(ConfigError, match=message):
        load_config_file(path)


def test_load_config_file_missing(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config_file(tmp_path / "absent.yaml")


def test_runtime_settings(monkeypatch, tmp_path):
    settings = load_runtime_settings()
    assert settings.sweep_workers == DEFAULT_SWEEP_WORKERS
    assert settings.log_level == "INFO"

    monkeypatch.setenv("CLAMPFOLD_OUTPUT_DIR", str(tmp_path))
    monkeypatch.setenv("CLAMPFOLD_LOG_LEVEL", "debug")
    monkeypatch.setenv("CLAMPFOLD_SWEEP_WORKERS", "2")
    monkeypatch.setenv("CLAMPFOLD_SWEEP_TIMEOUT_SEC", "30")
    settings = load_runtime_settings()
    assert settings.output_dir == tmp_path
    assert settings.log_level == "DEBUG"
    assert settings.sweep_workers == 2
    assert settings.sweep_timeout_sec == 30.0


def test_runtime_settings_reject_zero_workers(monkeypatch):
    monkeypatch.setenv("CLAMPFOLD_SWEEP_WORKERS", "0")
    with pytest.raises(ConfigError):
        load_runtime_settings()
