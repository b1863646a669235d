from profile_variance_monitor.domain.models.chart import ChartEvent
from profile_variance_monitor.domain.models.monitoring_result import (
    ErrorSeverity,
    ErrorSource,
    MonitoringResult,
)


def test_should_create_empty_result_with_default_values() -> None:
    result = MonitoringResult()

    assert (result.profiles, result.signal_count) == (0, 0)
    assert result.last_event is None
    assert result.errors == []
    assert result.metadata == {}
    assert not result.has_errors
    assert not result.has_critical_errors


def test_should_indicate_has_errors_when_errors_exist() -> None:
    result = MonitoringResult()

    result.add_error(
        code="TEST_WARNING",
        source=ErrorSource.UNKNOWN,
        severity=ErrorSeverity.WARNING,
    )

    assert result.has_errors
    assert not result.has_critical_errors


def test_should_detect_critical_errors() -> None:
    result = MonitoringResult()

    result.add_error(code="TEST_WARNING", severity=ErrorSeverity.WARNING)
    assert not result.has_critical_errors

    result.add_error(code="TEST_ERROR", source=ErrorSource.INPUT, severity=ErrorSeverity.ERROR)
    assert result.has_critical_errors


def test_should_count_events_and_keep_only_the_latest() -> None:
    result = MonitoringResult()
    first_signal = ChartEvent(t=2, log_lr_max=9.0, signaled=True, tau_hat=1, sigma_hat=2.0)
    last = ChartEvent(t=3, log_lr_max=0.1, signaled=False)

    for event in [ChartEvent(t=1, log_lr_max=0.1, signaled=False), first_signal, last]:
        result.record(event)

    assert (result.profiles, result.signal_count) == (3, 1)
    assert result.last_event is last
    assert result.last_signal is first_signal


def test_should_keep_the_most_recent_signal() -> None:
    result = MonitoringResult()

    for t in (4, 9):
        result.record(ChartEvent(t=t, log_lr_max=9.0, signaled=True, tau_hat=t - 1, sigma_hat=2.0))

    assert result.signal_count == 2
    assert result.last_signal.t == 9


def test_should_add_metadata() -> None:
    result = MonitoringResult()

    result.add_metadata("signals", 0)

    assert result.metadata == {"signals": 0}
