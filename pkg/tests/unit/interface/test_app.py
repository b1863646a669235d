import os
from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

import pytest

from profile_variance_monitor import __version__
from profile_variance_monitor.common.config import MonitorSettings, load_config
from profile_variance_monitor.interface.cli.app import Application
from profile_variance_monitor.interface.cli.errors import EXIT_SUCCESS, EXIT_USAGE


@pytest.fixture
def settings() -> MonitorSettings:
    with patch.dict(os.environ, {}, clear=True):
        return replace(load_config(), density_cache_dir="none", workers=3)


@pytest.fixture
def app(settings: MonitorSettings) -> Application:
    return Application(settings=settings)


def test_should_return_usage_exit_code_when_no_command_given(app: Application) -> None:
    assert app.run([]) == EXIT_USAGE


def test_should_exit_cleanly_for_help(app: Application, capsys) -> None:
    assert app.run(["--help"]) == EXIT_SUCCESS
    assert "monitor" in capsys.readouterr().out


def test_should_print_package_version(app: Application, capsys) -> None:
    assert app.run(["--version"]) == EXIT_SUCCESS
    assert __version__ in capsys.readouterr().out


def test_should_reject_unknown_log_level(app: Application) -> None:
    assert app.run(["--log-level", "chatty", "report", "--results", "x.csv"]) == EXIT_USAGE


def test_should_reject_monitor_without_control_limit(app: Application, tmp_path: Path) -> None:
    profiles = tmp_path / "profiles.txt"
    profiles.write_text("")

    code = app.run(["monitor", "--input", str(profiles), "--method", "var", "--n", "16"])

    assert code == EXIT_USAGE


def test_should_reject_monitor_with_non_dyadic_length(app: Application, tmp_path: Path) -> None:
    profiles = tmp_path / "profiles.txt"
    profiles.write_text("")

    code = app.run(
        ["monitor", "--input", str(profiles), "--method", "mad", "--n", "24", "--log-ucl", "5"]
    )

    assert code == EXIT_USAGE


def test_should_reject_calibration_with_too_few_runs(app: Application) -> None:
    code = app.run(["calibrate", "--method", "var", "--n", "16", "--runs", "499"])

    assert code == EXIT_USAGE


def test_should_reject_unknown_table(app: Application, tmp_path: Path) -> None:
    code = app.run(
        ["simulate", "--table", "T9", "--calibration-dir", str(tmp_path / "calibrations")]
    )

    assert code == EXIT_USAGE


def test_should_render_results_with_reference_column(
    app: Application, tmp_path: Path, capsys
) -> None:
    results = tmp_path / "t5.csv"
    results.write_text("p,sigma,NEWMA ARL,PSE ARL\n0,1.1,4.14,3.5\n0,0.7,1.43,1.2\n")

    assert app.run(["report", "--results", str(results)]) == EXIT_SUCCESS

    out = capsys.readouterr().out
    assert "NEWMA ARL" in out
    assert "4.14" in out


def test_should_return_data_exit_code_for_missing_results_file(
    app: Application, tmp_path: Path
) -> None:
    assert app.run(["report", "--results", str(tmp_path / "missing.csv")]) == 3


def test_should_layer_cli_flags_over_config_file_over_environment(
    app: Application, tmp_path: Path
) -> None:
    config = tmp_path / "monitor.conf"
    config.write_text("# shared settings\nTARGET_ARL = 100\nsigma0 = 2.0\n")
    args = app.parser.parse_args(
        ["--config", str(config), "calibrate", "--method", "var", "--n", "16", "--arl", "50"]
    )

    settings = app.resolve_settings(args)

    assert settings.target_arl == 50.0
    assert settings.sigma0 == 2.0
    assert settings.workers == 3


def test_should_reject_unknown_key_in_config_file(app: Application, tmp_path: Path) -> None:
    config = tmp_path / "monitor.conf"
    config.write_text("colour = blue\n")

    code = app.run(["--config", str(config), "report", "--results", str(tmp_path / "x.csv")])

    assert code == EXIT_USAGE
