import json
import logging
import sys
from io import StringIO

import pytest

from profile_variance_monitor.common.logging import (
    LogLevel,
    StructuredLogger,
    configure_logging,
)
from profile_variance_monitor.common.middleware import run_id_context


@pytest.mark.parametrize(
    "name,level",
    [(" debug ", LogLevel.DEBUG), ("INFO", LogLevel.INFO), ("Critical", LogLevel.CRITICAL)],
)
def test_should_resolve_log_level_by_case_insensitive_name(name: str, level: LogLevel) -> None:
    assert LogLevel.from_name(name) is level
    assert level.value == getattr(logging, level.name)


def test_should_raise_value_error_when_log_level_unknown() -> None:
    with pytest.raises(ValueError, match="Unknown log level"):
        LogLevel.from_name("loud")


@pytest.fixture
def stream() -> StringIO:
    return StringIO()


@pytest.fixture
def captured(stream: StringIO) -> StructuredLogger:
    logger = StructuredLogger("captured_logger")
    logger.logger.handlers = [logging.StreamHandler(stream)]
    logger.logger.setLevel(logging.DEBUG)
    return logger


def last_entry(stream: StringIO) -> dict:
    return json.loads(stream.getvalue().strip().splitlines()[-1])


def test_should_write_to_stderr_and_not_propagate() -> None:
    logger = StructuredLogger("stderr_logger")

    streams = [getattr(handler, "stream", None) for handler in logger.logger.handlers]

    assert sys.stderr in streams
    assert not logger.logger.propagate


def test_should_emit_one_json_object_with_context_fields(
    captured: StructuredLogger, stream: StringIO
) -> None:
    captured.info("Calibration finished", method="pse", log_ucl=7.5)

    entry = last_entry(stream)

    assert entry["message"] == "Calibration finished"
    assert entry["level"] == "info"
    assert entry["service"] == "profile_variance_monitor"
    assert (entry["method"], entry["log_ucl"]) == ("pse", 7.5)
    assert "timestamp" in entry
    assert "run_id" not in entry


def test_should_include_run_id_when_run_id_context_is_set(
    captured: StructuredLogger, stream: StringIO
) -> None:
    token = run_id_context.set("abc123")
    try:
        captured.info("Table written")
    finally:
        run_id_context.reset(token)

    assert last_entry(stream)["run_id"] == "abc123"


def test_should_serialize_non_json_values_as_strings(
    captured: StructuredLogger, stream: StringIO
) -> None:
    captured.warning("Using stored calibration", path=sys.stderr.__class__)

    assert isinstance(last_entry(stream)["path"], str)


@pytest.mark.parametrize("method_name", ["debug", "info", "warning", "error", "critical"])
def test_should_tag_entries_with_the_method_level(
    captured: StructuredLogger, stream: StringIO, method_name: str
) -> None:
    getattr(captured, method_name)("event")

    assert last_entry(stream)["level"] == method_name


def test_should_skip_formatting_when_level_disabled(
    captured: StructuredLogger, stream: StringIO
) -> None:
    captured.logger.setLevel(logging.ERROR)

    captured.info("ignored")

    assert stream.getvalue() == ""


def test_should_set_package_level_when_logging_configured() -> None:
    package_logger = logging.getLogger("profile_variance_monitor")
    previous = package_logger.level
    try:
        configure_logging(LogLevel.WARNING)
        assert package_logger.level == logging.WARNING
        child = StructuredLogger("profile_variance_monitor.some.module")
        assert not child.logger.isEnabledFor(logging.INFO)
    finally:
        package_logger.setLevel(previous)
