import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from src.main import app

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

runner = CliRunner()


@pytest.fixture
def env(tmp_path):
    return {
        "PRODSYS_CACHE_ENABLED": "false",
        "PRODSYS_REPORTS_PATH": str(tmp_path / "reports"),
        "PRODSYS_CONFIG_PATH": str(tmp_path / "none.yaml"),
        "PRODSYS_LOG_LEVEL": "WARNING",
    }


def _invoke(env, *args):
    return runner.invoke(app, list(args), env=env)


def test_check_passes(env, tmp_path):
    out = tmp_path / "example2.json"
    result = _invoke(env, "check", "--config", str(CONFIGS / "example2.json"), "--out", str(out))
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert report["command"] == "check"
    assert report["schema_version"] == "1.0"


def test_default_report_location(env, tmp_path):
    result = _invoke(env, "check", "-c", str(CONFIGS / "tt.json"), "--format", "json")
    assert result.exit_code == 0
    assert (tmp_path / "reports" / "tt_check.json").exists()


def test_failing_check_exits_one(env, tmp_path):
    out = tmp_path / "corrupted.json"
    result = _invoke(env, "check", "-c", str(CONFIGS / "corrupted_beta.json"), "-o", str(out))
    assert result.exit_code == 1
    assert json.loads(out.read_text())["passed"] is False


def test_tolerance_flag(env, tmp_path):
    out = tmp_path / "loose.json"
    result = _invoke(env, "check", "-c", str(CONFIGS / "corrupted_beta.json"), "-o", str(out), "--tol", "1e-3")
    assert result.exit_code == 0


def test_config_errors_exit_two(env, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"name": ')
    assert _invoke(env, "check", "-c", str(broken)).exit_code == 2
    assert _invoke(env, "check", "-c", str(tmp_path / "missing.json")).exit_code == 2
    assert _invoke(env, "index", "-c", str(CONFIGS / "example2.json")).exit_code == 2


def test_index_command(env, tmp_path):
    out = tmp_path / "index.json"
    result = _invoke(env, "index", "-c", str(CONFIGS / "example2_index.json"), "-o", str(out))
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["index"]["estimate"] == 1
    assert report["covariance"]["labels"] == ["u0", "u1", "u2"]


def test_powers_command(env, tmp_path):
    out = tmp_path / "powers.json"
    result = _invoke(env, "powers", "-c", str(CONFIGS / "powers_decay.json"), "-o", str(out))
    assert result.exit_code == 0
    assert json.loads(out.read_text())["powers"]["max_discrepancy"] < 1e-8


def test_powers_rejects_growth(env, tmp_path):
    out = tmp_path / "bad_powers.json"
    result = _invoke(env, "powers", "-c", str(CONFIGS / "powers_noncontractive.json"), "-o", str(out))
    assert result.exit_code == 1
    assert json.loads(out.read_text())["errors"]


def test_reports_are_byte_identical(env, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        _invoke(env, "index", "-c", str(CONFIGS / "powers_decay.json"), "-o", str(out))
    assert first.read_bytes() == second.read_bytes()
