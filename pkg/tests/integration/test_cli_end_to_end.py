import json
import os
from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest

from profile_variance_monitor.common.config import MonitorSettings, load_config
from profile_variance_monitor.domain.models.calibration import CalibrationResult
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.interface.cli.app import Application
from profile_variance_monitor.interface.cli.dependencies import (
    calibration_path,
    write_calibration,
)


@pytest.fixture
def settings(tmp_path: Path) -> MonitorSettings:
    with patch.dict(os.environ, {}, clear=True):
        return replace(load_config(), density_cache_dir=str(tmp_path / "density_cache"))


@pytest.fixture
def app(settings: MonitorSettings) -> Application:
    return Application(settings=settings)


def write_profiles(path: Path, sigmas: list[float], n: int, seed: int = 0) -> Path:
    rng = np.random.default_rng(seed)
    rows = [" ".join(f"{v:.17g}" for v in rng.normal(0.0, sigma, n).tolist()) for sigma in sigmas]
    path.write_text("\n".join(rows) + ("\n" if rows else ""))
    return path


def read_records(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines()]


def monitor_args(profiles: Path, out: Path, n: int, *extra: str) -> list[str]:
    return [
        "monitor",
        "--input",
        str(profiles),
        "--output",
        str(out),
        "--method",
        "var",
        "--n",
        str(n),
        "--m0",
        "1",
        *extra,
    ]


def test_should_emit_header_and_one_event_per_in_control_profile(
    app: Application, tmp_path: Path
) -> None:
    profiles = write_profiles(tmp_path / "in_control.txt", [1.0] * 30, 16)
    out = tmp_path / "events.jsonl"

    code = app.run(monitor_args(profiles, out, 16, "--log-ucl", "50"))

    records = read_records(out)
    assert code == 0
    assert records[0]["record"] == "header"
    assert records[0]["log_ucl"] == 50.0
    assert [record["t"] for record in records[1:]] == list(range(1, 31))
    assert not any(record["signaled"] for record in records[1:])


def test_should_write_only_header_for_empty_input(app: Application, tmp_path: Path) -> None:
    profiles = write_profiles(tmp_path / "empty.txt", [], 16)
    out = tmp_path / "events.jsonl"

    code = app.run(monitor_args(profiles, out, 16, "--ucl", "1000"))

    assert code == 0
    assert [record["record"] for record in read_records(out)] == ["header"]


def test_should_exit_with_data_error_for_malformed_row(app: Application, tmp_path: Path) -> None:
    profiles = write_profiles(tmp_path / "profiles.txt", [1.0] * 3, 16)
    with profiles.open("a") as handle:
        handle.write("1.0 2.0 not-a-number\n")
    out = tmp_path / "events.jsonl"

    code = app.run(monitor_args(profiles, out, 16, "--log-ucl", "50"))

    assert code == 3
    assert len(read_records(out)) == 1 + 3


def test_should_produce_identical_bytes_for_identical_runs(
    app: Application, tmp_path: Path
) -> None:
    profiles = write_profiles(tmp_path / "profiles.txt", [1.0] * 10 + [3.0] * 5, 32)
    first, second = tmp_path / "first.jsonl", tmp_path / "second.jsonl"

    app.run(monitor_args(profiles, first, 32, "--log-ucl", "8", "--on-signal", "reset"))
    app.run(monitor_args(profiles, second, 32, "--log-ucl", "8", "--on-signal", "reset"))

    assert first.read_bytes() == second.read_bytes()


def test_should_signal_after_variance_increase_and_summarize_estimates(
    app: Application, tmp_path: Path
) -> None:
    profiles = write_profiles(tmp_path / "shift.txt", [1.0] * 20 + [3.0] * 10, 64, seed=5)
    out = tmp_path / "events.jsonl"

    code = app.run(monitor_args(profiles, out, 64, "--log-ucl", "12"))

    records = read_records(out)
    assert code == 0
    summary = records[-1]
    assert summary["record"] == "signal"
    assert summary["t"] == 21
    assert 18 <= summary["tau_hat"] <= 21
    assert summary["sigma_hat"] > 1.5
    assert records[-2]["signaled"]


def fixed_calibration(method: EstimationMethod, n: int) -> CalibrationResult:
    return CalibrationResult(
        method=method,
        n=n,
        sigma0=1.0,
        log_ucl=4.0,
        achieved_arl=200.0,
        arl_std_err=4.0,
        m0=1.0,
        m0_std_err=0.001,
        truncated_runs=0,
        converged=True,
        target_arl=200.0,
        runs=2000,
        max_run_length=2000,
        seed=0,
        tolerance=0.05,
    )


def test_should_simulate_table_with_stored_calibrations_and_report_it(
    app: Application, tmp_path: Path, capsys
) -> None:
    calibrations = tmp_path / "calibrations"
    for method in (EstimationMethod.PSE, EstimationMethod.VAR):
        write_calibration(
            fixed_calibration(method, 256), calibration_path(calibrations, method, 256, 1.0, 200.0)
        )
    config = tmp_path / "monitor.conf"
    config.write_text("run_hard_cap = 300\n")
    results = tmp_path / "out" / "t5.csv"

    code = app.run(
        [
            "--config",
            str(config),
            "simulate",
            "--table",
            "T5-partial",
            "--runs",
            "2",
            "--seed",
            "3",
            "--calibration-dir",
            str(calibrations),
            "--out",
            str(results),
        ]
    )

    assert code == 0
    frame = pd.read_csv(results)
    assert list(frame["NEWMA ARL"]) == [4.14, 1.43]
    metadata = json.loads((tmp_path / "out" / "t5.meta.json").read_text())
    assert metadata["log_ucls"] == {"pse": 4.0, "var": 4.0}
    assert len(pd.read_csv(tmp_path / "out" / "t5.runs.csv")) == 8

    scatter = tmp_path / "scatter.dat"
    assert app.run(["report", "--results", str(results), "--scatter", str(scatter)]) == 0

    out = capsys.readouterr().out
    assert out.startswith("T5-partial: ")
    assert "NEWMA ARL" in out
    lines = scatter.read_text().splitlines()
    assert lines[0] == "p sigma method run run_length"
    assert len(lines) == 1 + 8



def simulate_args(calibrations: Path, *extra: str) -> list[str]:
    return [
        "simulate",
        "--table",
        "T5-partial",
        "--runs",
        "2",
        "--seed",
        "3",
        "--calibration-dir",
        str(calibrations),
        *extra,
    ]


def test_should_write_identical_table_files_for_identical_simulations(
    settings: MonitorSettings, tmp_path: Path, capsys
) -> None:
    app = Application(settings=replace(settings, run_hard_cap=300))
    calibrations = tmp_path / "calibrations"
    for method in (EstimationMethod.PSE, EstimationMethod.VAR):
        write_calibration(
            fixed_calibration(method, 256),
            calibration_path(calibrations, method, 256, 1.0, 200.0),
        )

    first, second = tmp_path / "first" / "t5.csv", tmp_path / "second" / "t5.csv"
    assert app.run(simulate_args(calibrations, "--out", str(first))) == 0
    assert app.run(simulate_args(calibrations, "--out", str(second))) == 0

    for name in ("t5.csv", "t5.meta.json", "t5.runs.csv"):
        assert (first.parent / name).read_bytes() == (second.parent / name).read_bytes()

    capsys.readouterr()
    assert app.run(simulate_args(calibrations)) == 0
    stdout = capsys.readouterr().out
    comment, header = stdout.splitlines()[:2]
    assert comment.startswith("# ")
    assert json.loads(comment[2:])["seed"] == 3
    assert header == first.read_text().splitlines()[0]

    rendered = tmp_path / "stdout.csv"
    rendered.write_text(stdout)
    assert app.run(["report", "--results", str(rendered)]) == 0
    assert "seed = 3" in capsys.readouterr().out

@pytest.mark.slow
def test_should_monitor_with_calibration_written_by_calibrate(
    app: Application, tmp_path: Path
) -> None:
    calibration = tmp_path / "var_n16.json"
    code = app.run(
        [
            "calibrate",
            "--method",
            "var",
            "--n",
            "16",
            "--arl",
            "5",
            "--runs",
            "500",
            "--m0-draws",
            "100000",
            "--tolerance",
            "0.1",
            "--out",
            str(calibration),
        ]
    )
    assert code == 0
    stored = json.loads(calibration.read_text())
    assert stored["method"] == "var"
    assert stored["max_run_length"] == 50

    profiles = write_profiles(tmp_path / "profiles.txt", [1.0] * 20, 16)
    out = tmp_path / "events.jsonl"
    code = app.run(
        [
            "monitor",
            "--input",
            str(profiles),
            "--output",
            str(out),
            "--method",
            "var",
            "--n",
            "16",
            "--calibration",
            str(calibration),
        ]
    )

    assert code == 0
    header = read_records(out)[0]
    assert header["log_ucl"] == stored["log_ucl"]
    assert header["m0"] == stored["m0"]
