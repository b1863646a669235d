import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from profile_variance_monitor.application.services.density_provider import (
    DensityProvider,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.common.random_streams import StreamPurpose, derive_rng
from profile_variance_monitor.domain.exceptions.experiment_exceptions import (
    ExcessiveTruncationError,
    NonBracketingIntervalError,
)
from profile_variance_monitor.domain.models.calibration import (
    ArlEstimate,
    CalibrationResult,
    CalibrationSpec,
    InControlMean,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.services.changepoint_chart import ChangepointChart
from profile_variance_monitor.domain.services.scale_estimators import (
    batch_scales,
    estimate,
)

logger = StructuredLogger(__name__)

MAX_TRUNCATED_FRACTION = 0.05
INITIAL_UPPER_LOG_UCL = 4.0
MAX_BRACKET_DOUBLINGS = 12
MAX_BISECTIONS = 60
_M0_BATCH = 10_000


def estimate_m0(
    method: EstimationMethod, m: int, sigma0: float, draws: int, seed: int
) -> InControlMean:
    """
    Monte Carlo mean of the statistic over pure-noise coefficient blocks at
    sigma0. Under an orthonormal transform the finest-detail block of a
    pure-noise profile is exactly m i.i.d. Normal(0, sigma0^2) values, so the
    blocks are drawn directly.
    """
    rng = derive_rng(seed, StreamPurpose.M0_ESTIMATION, m)
    total = 0.0
    total_sq = 0.0
    remaining = draws
    while remaining > 0:
        batch = min(_M0_BATCH, remaining)
        values = batch_scales(method, rng.normal(0.0, sigma0, size=(batch, m)))
        total += float(np.sum(values))
        total_sq += float(np.sum(np.square(values)))
        remaining -= batch

    mean = total / draws
    variance = max(total_sq / draws - mean**2, 0.0) * draws / (draws - 1)
    result = InControlMean(
        method=method,
        m=m,
        sigma0=sigma0,
        value=mean,
        std_err=math.sqrt(variance / draws),
        draws=draws,
    )
    logger.info(
        "m0 estimated", method=method.value, m=m, m0=result.value, std_err=result.std_err
    )
    return result


@dataclass
class Trajectory:
    """
    One in-control run drawn once and extended on demand.

    ``path`` holds max_tau h(tau) after each profile, so the run length for
    any log UCL is read off its running maximum without redrawing.
    """

    run: int
    rng: np.random.Generator
    values: list[float] = field(default_factory=list)
    s0: list[float] = field(default_factory=list)
    n_kept: list[int] = field(default_factory=list)
    path: list[float] = field(default_factory=list)

    @property
    def running_max(self) -> float:
        return max(self.path) if self.path else -math.inf

    def run_length(self, log_ucl: float, cap: int) -> tuple[int, bool]:
        """(run length, truncated); the trajectory must reach past log_ucl or the cap."""
        if not self.path:
            return cap, True
        peaks = np.maximum.accumulate(np.asarray(self.path))
        below = int(np.searchsorted(peaks, log_ucl, side="right"))
        if below < len(self.path):
            return below + 1, False
        return cap, True


def _extend(
    trajectories: list[Trajectory],
    chart: ChangepointChart,
    sigma0: float,
    log_ucl: float,
    cap: int,
) -> list[Trajectory]:
    """Draws further profiles until each running max exceeds log_ucl or hits the cap."""
    m = chart.density.m
    for trajectory in trajectories:
        while len(trajectory.path) < cap and trajectory.running_max <= log_ucl:
            stat = estimate(chart.method, trajectory.rng.normal(0.0, sigma0, size=m))
            trajectory.values.append(stat.value)
            trajectory.s0.append(np.nan if stat.s0 is None else stat.s0)
            trajectory.n_kept.append(0 if stat.n_kept is None else stat.n_kept)
            result = chart.evaluate(trajectory.values, trajectory.s0, trajectory.n_kept)
            trajectory.path.append(result.log_lr_max)
    return trajectories


def _chunks(items: list, count: int) -> list[list]:
    size = max(1, math.ceil(len(items) / count))
    return [items[start : start + size] for start in range(0, len(items), size)]


@dataclass
class CalibrateControlLimitUseCase:
    """
    Searches the log UCL whose in-control ARL matches the target.

    Every candidate UCL is scored on the same trajectories (common random
    numbers), which makes ARL a nondecreasing step function of log UCL:
    the upper bracket is doubled until it reaches the target, then the
    bracket is bisected.
    """

    densities: DensityProvider
    workers: int = 1

    def execute(self, spec: CalibrationSpec) -> CalibrationResult:
        m0 = estimate_m0(spec.method, spec.m, spec.sigma0, spec.m0_draws, spec.seed)
        chart = self._chart(spec, m0.value, 0.0)
        trajectories = [
            Trajectory(run=r, rng=derive_rng(spec.seed, StreamPurpose.CALIBRATION_SEARCH, r))
            for r in range(spec.runs)
        ]

        lower, upper = 0.0, INITIAL_UPPER_LOG_UCL
        trajectories = self._extend_all(trajectories, chart, spec, upper)
        upper_arl = self._arl(trajectories, upper, spec.cap)
        doublings = 0
        while upper_arl.arl < spec.target_arl:
            if doublings >= MAX_BRACKET_DOUBLINGS:
                raise NonBracketingIntervalError(spec.target_arl, upper_arl.arl, upper)
            lower, upper = upper, 2.0 * upper
            doublings += 1
            trajectories = self._extend_all(trajectories, chart, spec, upper)
            upper_arl = self._arl(trajectories, upper, spec.cap)
            logger.debug("Upper bracket expanded", log_ucl=upper, arl=upper_arl.arl)

        lower_arl = self._arl(trajectories, lower, spec.cap)
        if lower_arl.arl > spec.target_arl * (1 + spec.tolerance):
            raise NonBracketingIntervalError(spec.target_arl, lower_arl.arl, lower)

        best_log_ucl, best = min(
            ((lower, lower_arl), (upper, upper_arl)),
            key=lambda candidate: abs(candidate[1].arl - spec.target_arl),
        )
        for _ in range(MAX_BISECTIONS):
            if abs(best.arl - spec.target_arl) <= spec.tolerance * spec.target_arl / 5:
                break
            middle = 0.5 * (lower + upper)
            estimate_at_middle = self._arl(trajectories, middle, spec.cap)
            if abs(estimate_at_middle.arl - spec.target_arl) < abs(best.arl - spec.target_arl):
                best_log_ucl, best = middle, estimate_at_middle
            if estimate_at_middle.arl < spec.target_arl:
                lower = middle
            else:
                upper = middle

        if best.truncated_runs > MAX_TRUNCATED_FRACTION * spec.runs:
            raise ExcessiveTruncationError(best.truncated_runs, spec.runs, spec.cap)

        converged = abs(best.arl - spec.target_arl) <= spec.tolerance * spec.target_arl
        if not converged:
            logger.warning(
                "Calibration did not reach the ARL tolerance",
                method=spec.method.value,
                achieved_arl=best.arl,
                target_arl=spec.target_arl,
            )

        validation = self.validate(spec, best_log_ucl, m0.value)
        logger.info(
            "Calibration finished",
            method=spec.method.value,
            n=spec.n,
            log_ucl=best_log_ucl,
            achieved_arl=best.arl,
            validation_arl=validation.arl,
        )
        return CalibrationResult(
            method=spec.method,
            n=spec.n,
            sigma0=spec.sigma0,
            log_ucl=best_log_ucl,
            achieved_arl=best.arl,
            arl_std_err=best.std_err,
            m0=m0.value,
            m0_std_err=m0.std_err,
            truncated_runs=best.truncated_runs,
            converged=converged,
            target_arl=spec.target_arl,
            runs=spec.runs,
            max_run_length=spec.cap,
            seed=spec.seed,
            tolerance=spec.tolerance,
            validation_arl=validation.arl,
            validation_std_err=validation.std_err,
            window=spec.window,
        )

    def validate(
        self, spec: CalibrationSpec, log_ucl: float, m0: float, seed: int | None = None
    ) -> ArlEstimate:
        """
        In-control ARL at a fixed log UCL. Runs come from the validation
        stream family, disjoint from the search streams for the same seed.
        """
        seed = spec.seed if seed is None else seed
        chart = self._chart(spec, m0, log_ucl)
        trajectories = [
            Trajectory(
                run=r, rng=derive_rng(seed, StreamPurpose.CALIBRATION_VALIDATION, r)
            )
            for r in range(spec.runs)
        ]
        trajectories = self._extend_all(trajectories, chart, spec, log_ucl)
        return self._arl(trajectories, log_ucl, spec.cap)

    def _chart(self, spec: CalibrationSpec, m0: float, log_ucl: float) -> ChangepointChart:
        return ChangepointChart(
            density=self.densities.density(spec.method, spec.m),
            sigma0=spec.sigma0,
            log_ucl=log_ucl,
            m0=m0,
            window=spec.window,
        )

    def _extend_all(
        self,
        trajectories: list[Trajectory],
        chart: ChangepointChart,
        spec: CalibrationSpec,
        log_ucl: float,
    ) -> list[Trajectory]:
        if self.workers <= 1:
            return _extend(trajectories, chart, spec.sigma0, log_ucl, spec.cap)

        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = [
                pool.submit(_extend, chunk, chart, spec.sigma0, log_ucl, spec.cap)
                for chunk in _chunks(trajectories, self.workers * 4)
            ]
            extended = [trajectory for future in futures for trajectory in future.result()]
        return sorted(extended, key=lambda trajectory: trajectory.run)

    @staticmethod
    def _arl(trajectories: list[Trajectory], log_ucl: float, cap: int) -> ArlEstimate:
        outcomes = [trajectory.run_length(log_ucl, cap) for trajectory in trajectories]
        lengths = np.array([length for length, _ in outcomes], dtype=float)
        truncated = sum(1 for _, was_truncated in outcomes if was_truncated)
        std_err = float(np.std(lengths, ddof=1) / math.sqrt(lengths.size))
        return ArlEstimate(
            arl=float(np.mean(lengths)),
            std_err=std_err,
            truncated_runs=truncated,
            runs=lengths.size,
        )
