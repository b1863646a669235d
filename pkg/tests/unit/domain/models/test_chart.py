import pytest

from profile_variance_monitor.domain.exceptions.chart_exceptions import (
    InvalidChartParameterError,
)
from profile_variance_monitor.domain.models.chart import ChartEvent, ChartState
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from tests.factories import var_statistic


def test_should_count_profiles_across_resets_and_window_drops() -> None:
    state = ChartState(
        method=EstimationMethod.VAR,
        sigma0=1.0,
        log_ucl=3.0,
        history=(var_statistic(1.0), var_statistic(2.0)),
        start_index=7,
        segment_start=5,
    )

    assert state.t == 9
    assert state.local_t == 4


def test_should_report_local_tau_hat_relative_to_last_reset() -> None:
    state = ChartState(
        method=EstimationMethod.VAR,
        sigma0=1.0,
        log_ucl=3.0,
        history=(var_statistic(1.0),),
        log_lr_max=4.0,
        signaled=True,
        tau_hat=12,
        sigma_hat=2.0,
        start_index=10,
        segment_start=10,
    )

    assert state.local_tau_hat == 2


def test_should_raise_when_sigma0_not_positive() -> None:
    with pytest.raises(InvalidChartParameterError, match="sigma0"):
        ChartState(method=EstimationMethod.VAR, sigma0=0.0, log_ucl=1.0)


def test_should_raise_when_log_ucl_not_finite() -> None:
    with pytest.raises(InvalidChartParameterError, match="finite"):
        ChartState(method=EstimationMethod.VAR, sigma0=1.0, log_ucl=float("inf"))


def test_should_raise_when_signal_does_not_exceed_ucl() -> None:
    with pytest.raises(InvalidChartParameterError, match="above the UCL"):
        ChartState(
            method=EstimationMethod.VAR,
            sigma0=1.0,
            log_ucl=3.0,
            log_lr_max=3.0,
            signaled=True,
        )


def test_should_raise_when_segment_start_after_start_index() -> None:
    with pytest.raises(InvalidChartParameterError, match="segment_start"):
        ChartState(
            method=EstimationMethod.VAR, sigma0=1.0, log_ucl=3.0, start_index=2, segment_start=3
        )


def test_should_emit_zero_statistic_event_for_empty_state() -> None:
    event = ChartEvent.from_state(
        ChartState(method=EstimationMethod.MAD, sigma0=1.0, log_ucl=2.0), source="test"
    )

    assert event.t == 0
    assert event.log_lr_max == 0.0
    assert not event.signaled
    assert event.context == {"source": "test"}
