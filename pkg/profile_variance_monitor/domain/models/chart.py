from dataclasses import dataclass, field

import numpy as np

from profile_variance_monitor.domain.exceptions.chart_exceptions import (
    InvalidChartParameterError,
)
from profile_variance_monitor.domain.models.noise_statistic import (
    EstimationMethod,
    NoiseStatistic,
)


@dataclass(frozen=True)
class ChartState:
    """
    Snapshot of one monitored stream after T updates.

    ``log_ucl`` and ``log_lr_max`` are on the log likelihood-ratio scale.
    ``start_index`` counts the profiles seen before ``history[0]`` (resets
    and window drops); ``segment_start`` counts those seen before the last
    reset. ``tau_hat`` is absolute: the changepoint lies after profile
    ``tau_hat``.
    """

    method: EstimationMethod
    sigma0: float
    log_ucl: float
    history: tuple[NoiseStatistic, ...] = ()
    log_lr_max: float | None = None
    signaled: bool = False
    tau_hat: int | None = None
    sigma_hat: float | None = None
    start_index: int = 0
    segment_start: int = 0

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise InvalidChartParameterError(f"sigma0 must be positive, got {self.sigma0}")
        if not np.isfinite(self.log_ucl):
            raise InvalidChartParameterError(f"log UCL must be finite, got {self.log_ucl}")
        if self.segment_start > self.start_index:
            raise InvalidChartParameterError(
                "segment_start cannot exceed the index of the first kept statistic"
            )
        if self.signaled and (self.log_lr_max is None or self.log_lr_max <= self.log_ucl):
            raise InvalidChartParameterError("a signal requires log_lr_max above the UCL")

    @property
    def t(self) -> int:
        """Absolute count of profiles observed so far."""
        return self.start_index + len(self.history)

    @property
    def local_t(self) -> int:
        """Profiles observed since the last reset."""
        return self.t - self.segment_start

    @property
    def local_tau_hat(self) -> int | None:
        if self.tau_hat is None:
            return None
        return self.tau_hat - self.segment_start


@dataclass(frozen=True)
class ChartEvent:
    """One emitted record per monitored profile."""

    t: int
    log_lr_max: float
    signaled: bool
    tau_hat: int | None = None
    sigma_hat: float | None = None
    context: dict = field(default_factory=dict)

    @classmethod
    def from_state(cls, state: ChartState, **context) -> "ChartEvent":
        return cls(
            t=state.t,
            log_lr_max=float(state.log_lr_max) if state.log_lr_max is not None else 0.0,
            signaled=state.signaled,
            tau_hat=state.tau_hat,
            sigma_hat=state.sigma_hat,
            context=context,
        )
