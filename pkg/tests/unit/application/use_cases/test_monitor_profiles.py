import numpy as np
import pytest

from profile_variance_monitor.application.services.statistic_pipeline import (
    StatisticPipeline,
)
from profile_variance_monitor.application.use_cases.monitor_profiles import (
    MonitorProfilesUseCase,
    SignalPolicy,
)
from profile_variance_monitor.domain.models.chart import ChartEvent
from profile_variance_monitor.domain.models.monitoring_result import (
    ErrorSeverity,
    ErrorSource,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.services.changepoint_chart import ChangepointChart
from profile_variance_monitor.domain.services.noise_densities import NoiseDensity
from profile_variance_monitor.infrastructure.adapters.wavelet_transform import (
    PyWaveletsTransform,
)
from profile_variance_monitor.infrastructure.converters.profile_reader import (
    DelimitedProfileReader,
)

N = 64


def profile_lines(sigmas: list[float], seed: int = 7) -> list[str]:
    rng = np.random.default_rng(seed)
    return [",".join(repr(float(v)) for v in rng.normal(0.0, sigma, N)) for sigma in sigmas]


def build_use_case(
    transform: PyWaveletsTransform,
    lines: list[str],
    policy: SignalPolicy = SignalPolicy.STOP,
    log_ucl: float = 20.0,
    window: int | None = None,
) -> MonitorProfilesUseCase:
    chart = ChangepointChart(
        density=NoiseDensity(method=EstimationMethod.VAR, m=N // 2),
        sigma0=1.0,
        log_ucl=log_ucl,
        m0=1.0,
        window=window,
    )
    return MonitorProfilesUseCase(
        source=DelimitedProfileReader(lines),
        pipeline=StatisticPipeline(transform, EstimationMethod.VAR),
        chart=chart,
        policy=policy,
    )


@pytest.fixture
def shifted_lines() -> list[str]:
    return profile_lines([1.0] * 10 + [4.0] * 10)


def test_should_stop_at_first_signal_and_locate_the_change(
    transform: PyWaveletsTransform, shifted_lines: list[str]
) -> None:
    result = build_use_case(transform, shifted_lines).execute(N)

    assert not result.has_errors
    assert (result.profiles, result.signal_count) == (11, 1)
    signal = result.last_signal
    assert result.last_event is signal
    assert signal.t == 11
    assert 9 <= signal.tau_hat <= 10
    assert signal.sigma_hat > 2.0
    assert result.metadata == {"profiles": 11, "signals": 1}


def test_should_continue_after_signals_when_policy_is_reset(
    transform: PyWaveletsTransform, shifted_lines: list[str]
) -> None:
    received: list[ChartEvent] = []

    result = build_use_case(transform, shifted_lines, SignalPolicy.RESET).execute(
        N, sink=received.append
    )

    assert result.profiles == 20
    assert result.signal_count >= 2
    assert [event.t for event in received] == list(range(1, 21))
    assert result.signal_count == sum(event.signaled for event in received)


def test_should_send_every_event_to_the_sink(
    transform: PyWaveletsTransform, shifted_lines: list[str]
) -> None:
    received: list[ChartEvent] = []

    result = build_use_case(transform, shifted_lines).execute(N, sink=received.append)

    assert len(received) == result.profiles == 11
    assert received[-1] is result.last_event


def test_should_report_invalid_input_and_keep_earlier_events(
    transform: PyWaveletsTransform,
) -> None:
    lines = profile_lines([1.0] * 3) + ["1.0, oops"]

    result = build_use_case(transform, lines).execute(N)

    assert result.profiles == 3
    assert result.has_critical_errors
    error = result.errors[0]
    assert error.code == "INVALID_INPUT"
    assert error.source is ErrorSource.INPUT
    assert error.severity is ErrorSeverity.ERROR
    assert error.details["error_type"] == "ProfileFormatError"


def test_should_report_invalid_input_when_profile_length_differs(
    transform: PyWaveletsTransform,
) -> None:
    result = build_use_case(transform, ["1.0 2.0 3.0"]).execute(N)

    assert result.profiles == 0
    assert result.errors[0].details["error_type"] == "ProfileLengthMismatchError"


def test_should_return_no_events_for_empty_stream(transform: PyWaveletsTransform) -> None:
    result = build_use_case(transform, ["# no profiles yet", ""]).execute(N)

    assert result.profiles == 0
    assert result.last_event is None
    assert not result.has_errors
    assert result.metadata["signals"] == 0


def test_should_hold_only_counters_and_latest_events_for_long_windowed_stream(
    transform: PyWaveletsTransform,
) -> None:
    lines = profile_lines([1.0] * 60)
    received: list[ChartEvent] = []

    result = build_use_case(transform, lines, SignalPolicy.RESET, window=8).execute(
        N, sink=received.append
    )

    assert result.profiles == len(received) == 60
    assert result.last_event.t == 60
    assert not any(isinstance(value, list) and value for value in vars(result).values())
