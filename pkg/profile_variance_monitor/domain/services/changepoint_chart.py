"""
Likelihood-ratio changepoint chart for the noise scale.

For a history of T statistics the chart evaluates, for every candidate
changepoint tau in [0, T), the log likelihood ratio

    h(tau) = sum_{t > tau} log f(s_t; sigma_hat(tau)) - log f(s_t; sigma0)

with sigma_hat(tau) the ratio of the post-tau mean statistic to the pre-tau
mean (the in-control mean m0 stands in for the empty pre-tau mean at
tau = 0). A change is signaled when max_tau h(tau) exceeds log UCL.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.chart_exceptions import (
    InvalidChangepointError,
    InvalidChartParameterError,
    MethodMismatchError,
)
from profile_variance_monitor.domain.models.chart import ChartState
from profile_variance_monitor.domain.models.noise_statistic import (
    EstimationMethod,
    NoiseStatistic,
)
from profile_variance_monitor.domain.services.noise_densities import NoiseDensity

logger = StructuredLogger(__name__)

_MIN_RATIO = 1e-12
_MAX_RATIO = 1e12
_ROW_CHUNK = 256


def _arrays(history: Sequence[NoiseStatistic]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = np.array([stat.value for stat in history], dtype=float)
    s0 = np.array([np.nan if stat.s0 is None else stat.s0 for stat in history], dtype=float)
    n_kept = np.array([0 if stat.n_kept is None else stat.n_kept for stat in history], dtype=int)
    return values, s0, n_kept


def sigma_hat_profile(
    values: np.ndarray, method: EstimationMethod, sigma0: float, m0: float
) -> np.ndarray:
    """
    sigma_hat(tau) for every tau in [0, T), from prefix sums.

    The post/pre mean ratio is clipped to [1e-12, 1e12] so a zero pre-tau
    mean (or a zero post-tau mean) yields a finite, extreme sigma_hat rather
    than inf or 0; 0/0 ratios count as no change. Clipping is logged at
    debug level.
    """
    values = np.asarray(values, dtype=float)
    count = values.size
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    tau = np.arange(count)

    post_mean = (prefix[-1] - prefix[:count]) / (count - tau)
    pre_mean = np.empty(count)
    pre_mean[0] = m0
    pre_mean[1:] = prefix[1:count] / tau[1:]

    with np.errstate(divide="ignore", invalid="ignore"):
        raw = post_mean / pre_mean
    clipped = (raw < _MIN_RATIO) | (raw > _MAX_RATIO)
    if clipped.any():
        logger.debug(
            "sigma_hat ratio clipped",
            count=int(clipped.sum()),
            first_tau=int(np.argmax(clipped)),
        )
    ratio = np.clip(raw, _MIN_RATIO, _MAX_RATIO)
    ratio = np.where(np.isnan(ratio), 1.0, ratio)
    # Var statistics are variances: the ratio is sigma^2 / sigma0^2
    if method is EstimationMethod.VAR:
        ratio = np.sqrt(ratio)
    return sigma0 * ratio


def log_lr_profile(
    values: np.ndarray,
    s0: np.ndarray,
    n_kept: np.ndarray,
    density: NoiseDensity,
    sigma0: float,
    m0: float,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns (h, sigma_hat), both indexed by tau in [0, T).

    Rows of the tau-by-t ratio matrix are evaluated in chunks; only columns
    t >= tau contribute.
    """
    values = np.asarray(values, dtype=float)
    count = values.size
    sigma_hats = sigma_hat_profile(values, density.method, sigma0, m0)
    in_control = density.log_density(values, sigma0, s0, n_kept)

    h = np.empty(count)
    columns = np.arange(count)
    for start in range(0, count, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, count)
        candidate = density.log_density(
            values[None, start:],
            sigma_hats[start:stop, None],
            s0[None, start:],
            n_kept[None, start:],
        )
        ratios = candidate - in_control[None, start:]
        mask = columns[None, start:] >= columns[start:stop, None]
        h[start:stop] = np.sum(np.where(mask, ratios, 0.0), axis=1)
    return h, sigma_hats


def sigma_hat(
    history: Sequence[NoiseStatistic],
    tau: int,
    method: EstimationMethod,
    sigma0: float,
    m0: float,
) -> float:
    """sigma_hat(tau): sigma0 times the post-tau to pre-tau mean ratio."""
    if not 0 <= tau < len(history):
        raise InvalidChangepointError(tau, len(history))
    values, _, _ = _arrays(history)
    return float(sigma_hat_profile(values, method, sigma0, m0)[tau])


def log_lr(
    history: Sequence[NoiseStatistic],
    tau: int,
    density: NoiseDensity,
    sigma0: float,
    sigma_cand: float,
) -> float:
    """log h(tau) evaluated at an explicit candidate sigma; 0 when tau == T."""
    if not 0 <= tau <= len(history):
        raise InvalidChangepointError(tau, len(history))
    if not sigma_cand > 0:
        raise InvalidChartParameterError(f"candidate sigma must be positive, got {sigma_cand}")
    values, s0, n_kept = _arrays(history[tau:])
    if values.size == 0:
        return 0.0
    candidate = density.log_density(values, sigma_cand, s0, n_kept)
    in_control = density.log_density(values, sigma0, s0, n_kept)
    return float(np.sum(candidate - in_control))


@dataclass(frozen=True)
class ChartStatistic:
    log_lr_max: float
    argmax: int
    sigma_hat: float


@dataclass(frozen=True)
class ChangepointChart:
    """
    Chart parameters plus the pure ``update`` transition.

    ``window`` optionally caps the history to the most recent statistics.
    """

    density: NoiseDensity
    sigma0: float
    log_ucl: float
    m0: float
    window: int | None = None

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise InvalidChartParameterError(f"sigma0 must be positive, got {self.sigma0}")
        if not self.m0 > 0:
            raise InvalidChartParameterError(
                f"in-control statistic mean m0 must be positive, got {self.m0}"
            )
        if not np.isfinite(self.log_ucl):
            raise InvalidChartParameterError(f"log UCL must be finite, got {self.log_ucl}")
        if self.window is not None and self.window < 1:
            raise InvalidChartParameterError(f"window must be at least 1, got {self.window}")

    @property
    def method(self) -> EstimationMethod:
        return self.density.method

    def start(self) -> ChartState:
        return ChartState(method=self.method, sigma0=self.sigma0, log_ucl=self.log_ucl)

    def reset(self, state: ChartState) -> ChartState:
        """Empty state that keeps counting profiles from where ``state`` stopped."""
        return ChartState(
            method=self.method,
            sigma0=self.sigma0,
            log_ucl=self.log_ucl,
            start_index=state.t,
            segment_start=state.t,
        )

    def evaluate(self, values, s0=None, n_kept=None) -> ChartStatistic:
        """max_tau h(tau) over a full statistic history given as arrays."""
        values = np.asarray(values, dtype=float)
        count = values.size
        s0 = np.full(count, np.nan) if s0 is None else np.asarray(s0, dtype=float)
        n_kept = np.zeros(count, dtype=int) if n_kept is None else np.asarray(n_kept)
        h, sigma_hats = log_lr_profile(values, s0, n_kept, self.density, self.sigma0, self.m0)
        # np.argmax returns the first maximum: ties go to the earliest tau
        best = int(np.argmax(h))
        return ChartStatistic(
            log_lr_max=float(h[best]), argmax=best, sigma_hat=float(sigma_hats[best])
        )

    def update(self, state: ChartState, stat: NoiseStatistic) -> ChartState:
        if stat.method is not self.method:
            raise MethodMismatchError(
                self.method.to_display_string(), stat.method.to_display_string()
            )
        if stat.m != self.density.m:
            raise InvalidChartParameterError(
                f"chart expects statistics from {self.density.m} coefficients, got {stat.m}"
            )

        history = state.history + (stat,)
        start_index = state.start_index
        if self.window is not None and len(history) > self.window:
            dropped = len(history) - self.window
            history = history[dropped:]
            start_index += dropped

        values, s0, n_kept = _arrays(history)
        result = self.evaluate(values, s0, n_kept)
        signaled = result.log_lr_max > self.log_ucl

        if signaled:
            logger.debug(
                "chart_signal",
                method=self.method.value,
                t=start_index + len(history),
                log_lr_max=result.log_lr_max,
                tau_hat=start_index + result.argmax,
            )

        return ChartState(
            method=self.method,
            sigma0=self.sigma0,
            log_ucl=self.log_ucl,
            history=history,
            log_lr_max=result.log_lr_max,
            signaled=signaled,
            tau_hat=start_index + result.argmax if signaled else None,
            sigma_hat=result.sigma_hat if signaled else None,
            start_index=start_index,
            segment_start=state.segment_start,
        )
