from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from profile_variance_monitor.domain.models.chart import ChartEvent


class ErrorSource(Enum):
    INPUT = "input"
    WAVELET = "wavelet"
    ESTIMATION = "estimation"
    CHART = "chart"
    UNKNOWN = "unknown"


class ErrorSeverity(Enum):
    WARNING = "warning"
    ERROR = "error"


@dataclass
class MonitoringError:
    code: str
    source: ErrorSource
    severity: ErrorSeverity
    details: dict[str, Any] | None = None


@dataclass
class MonitoringResult:
    """
    Outcome of monitoring one profile stream: counters over the emitted
    chart events, the most recent event and signal, any errors encountered
    and metadata about the run.

    Events themselves go to the sink as they are produced; only a fixed
    amount of state is kept here however long the stream runs.

    The use case layer returns this so the interface layer can decide the
    exit status without inspecting exceptions.
    """

    profiles: int = 0
    signal_count: int = 0
    last_event: ChartEvent | None = None
    last_signal: ChartEvent | None = None
    errors: list[MonitoringError] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def record(self, event: ChartEvent) -> None:
        self.profiles += 1
        self.last_event = event
        if event.signaled:
            self.signal_count += 1
            self.last_signal = event

    @property
    def has_errors(self) -> bool:
        return len(self.errors) > 0

    @property
    def has_critical_errors(self) -> bool:
        return any(error.severity == ErrorSeverity.ERROR for error in self.errors)

    def add_error(
        self,
        code: str,
        source: ErrorSource = ErrorSource.UNKNOWN,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        details: dict[str, Any] | None = None,
    ) -> None:
        self.errors.append(
            MonitoringError(code=code, source=source, severity=severity, details=details)
        )

    def add_metadata(self, key: str, value: Any) -> None:
        self.metadata[key] = value
