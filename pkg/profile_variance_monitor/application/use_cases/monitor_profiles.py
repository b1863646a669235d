from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

from profile_variance_monitor.application.ports.profile_source import ProfileSourcePort
from profile_variance_monitor.application.services.statistic_pipeline import (
    StatisticPipeline,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.base import DomainError
from profile_variance_monitor.domain.exceptions.chart_exceptions import ChartError
from profile_variance_monitor.domain.exceptions.estimation_exceptions import (
    EstimationError,
)
from profile_variance_monitor.domain.exceptions.input_exceptions import InputError
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import WaveletError
from profile_variance_monitor.domain.models.chart import ChartEvent
from profile_variance_monitor.domain.models.monitoring_result import (
    ErrorSeverity,
    ErrorSource,
    MonitoringResult,
)
from profile_variance_monitor.domain.services.changepoint_chart import ChangepointChart

logger = StructuredLogger(__name__)


class SignalPolicy(Enum):
    STOP = "stop"
    RESET = "reset"


EventSink = Callable[[ChartEvent], None]


@dataclass
class MonitorProfilesUseCase:
    """
    Streams profiles through the statistic pipeline and the chart, one
    event per profile. On a signal the stream either stops or the chart
    restarts from an empty history and monitoring continues.
    """

    source: ProfileSourcePort
    pipeline: StatisticPipeline
    chart: ChangepointChart
    policy: SignalPolicy = SignalPolicy.STOP
    _error_sources: dict = field(
        init=False,
        default_factory=lambda: {
            InputError: ("INVALID_INPUT", ErrorSource.INPUT),
            WaveletError: ("TRANSFORM_ERROR", ErrorSource.WAVELET),
            EstimationError: ("ESTIMATION_ERROR", ErrorSource.ESTIMATION),
            ChartError: ("CHART_ERROR", ErrorSource.CHART),
        },
    )

    def execute(self, n: int, sink: EventSink | None = None) -> MonitoringResult:
        result = MonitoringResult()
        state = self.chart.start()

        try:
            for profile in self.source.profiles(n):
                state = self.chart.update(state, self.pipeline.statistic(profile))
                event = ChartEvent.from_state(state)
                result.record(event)
                if sink:
                    sink(event)

                if not state.signaled:
                    continue

                logger.info(
                    "Change in noise variance signaled",
                    t=state.t,
                    tau_hat=state.tau_hat,
                    sigma_hat=state.sigma_hat,
                    log_lr_max=state.log_lr_max,
                )
                if self.policy is SignalPolicy.STOP:
                    break
                state = self.chart.reset(state)

        except DomainError as e:
            code, source = self._classify(e)
            logger.error(
                "Monitoring stopped",
                error=e.message,
                error_type=type(e).__name__,
                profiles=result.profiles,
            )
            result.add_error(
                code=code,
                source=source,
                severity=ErrorSeverity.ERROR,
                details={"error_type": type(e).__name__, "message": e.message},
            )

        result.add_metadata("profiles", result.profiles)
        result.add_metadata("signals", result.signal_count)
        return result

    def _classify(self, error: DomainError) -> tuple[str, ErrorSource]:
        for error_type, classification in self._error_sources.items():
            if isinstance(error, error_type):
                return classification
        return "DOMAIN_ERROR", ErrorSource.UNKNOWN
