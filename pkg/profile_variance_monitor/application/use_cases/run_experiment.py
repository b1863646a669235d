from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from profile_variance_monitor.application.services.profile_generator import (
    ProfileGenerator,
)
from profile_variance_monitor.application.services.statistic_pipeline import (
    StatisticPipeline,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.common.random_streams import StreamPurpose, derive_rng
from profile_variance_monitor.domain.exceptions.experiment_exceptions import (
    InvalidGenerationSpecError,
)
from profile_variance_monitor.domain.models.simulation import (
    DEFAULT_RUN_HARD_CAP,
    ExperimentSummary,
    ProfileGenSpec,
    RunRecord,
)
from profile_variance_monitor.domain.services.changepoint_chart import ChangepointChart

logger = StructuredLogger(__name__)


@dataclass(frozen=True)
class ExperimentDesign:
    """In-control and out-of-control generators around a true changepoint."""

    gen0: ProfileGenSpec
    gen1: ProfileGenSpec
    tau_true: int

    def __post_init__(self):
        if self.tau_true < 0:
            raise InvalidGenerationSpecError(
                f"true changepoint must be nonnegative, got {self.tau_true}"
            )
        if self.gen0.n != self.gen1.n:
            raise InvalidGenerationSpecError(
                "in-control and out-of-control profiles must share one length"
            )


def simulate_run(
    design: ExperimentDesign,
    chart: ChangepointChart,
    pipeline: StatisticPipeline,
    generator: ProfileGenerator,
    seed: int,
    stream_keys: tuple[int, ...],
    run: int,
    hard_cap: int = DEFAULT_RUN_HARD_CAP,
) -> RunRecord:
    """
    One monitoring run with the false alarm restart rule: a signal at local
    step T <= tau (the current pre-change length) is a false alarm, after
    which the chart is reset and tau shrinks by T.
    """
    rng = derive_rng(seed, StreamPurpose.EXPERIMENT, *stream_keys, run)
    state = chart.start()
    tau_current = design.tau_true
    restarts: list[int] = []

    for used in range(1, hard_cap + 1):
        spec = design.gen0 if state.local_t < tau_current else design.gen1
        profile = generator.generate(spec, rng, index=used)
        state = chart.update(state, pipeline.statistic(profile))
        if not state.signaled:
            continue

        steps = state.local_t
        if steps <= tau_current:
            tau_current -= steps
            restarts.append(tau_current)
            state = chart.reset(state)
            continue

        return RunRecord(
            run_length=steps - tau_current,
            tau_hat=state.tau_hat,
            local_tau_hat=state.local_tau_hat,
            sigma_hat=state.sigma_hat,
            false_alarms=len(restarts),
            restarts=tuple(restarts),
            profiles_used=used,
        )

    logger.warning(
        "Run reached the profile cap without a signal",
        run=run,
        hard_cap=hard_cap,
        false_alarms=len(restarts),
    )
    return RunRecord(
        run_length=max(state.local_t - tau_current, 0),
        tau_hat=None,
        local_tau_hat=None,
        sigma_hat=None,
        false_alarms=len(restarts),
        restarts=tuple(restarts),
        truncated=True,
        profiles_used=hard_cap,
    )


def _simulate_runs(
    design: ExperimentDesign,
    chart: ChangepointChart,
    pipeline: StatisticPipeline,
    generator: ProfileGenerator,
    seed: int,
    stream_keys: tuple[int, ...],
    runs: list[int],
    hard_cap: int,
) -> list[RunRecord]:
    return [
        simulate_run(design, chart, pipeline, generator, seed, stream_keys, run, hard_cap)
        for run in runs
    ]


@dataclass
class RunExperimentUseCase:
    """
    Repeats monitoring runs for one chart and design and aggregates them.

    Run r always draws from the stream (seed, stream_keys, r), so the
    records are identical for any worker count.
    """

    generator: ProfileGenerator
    workers: int = 1
    hard_cap: int = DEFAULT_RUN_HARD_CAP

    def execute(
        self,
        design: ExperimentDesign,
        chart: ChangepointChart,
        pipeline: StatisticPipeline,
        runs: int,
        seed: int,
        stream_keys: tuple[int, ...] = (),
    ) -> tuple[list[RunRecord], ExperimentSummary]:
        indices = list(range(runs))
        if self.workers <= 1:
            records = _simulate_runs(
                design, chart, pipeline, self.generator, seed, stream_keys, indices, self.hard_cap
            )
        else:
            size = max(1, -(-runs // (self.workers * 4)))
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [
                    pool.submit(
                        _simulate_runs,
                        design,
                        chart,
                        pipeline,
                        self.generator,
                        seed,
                        stream_keys,
                        indices[start : start + size],
                        self.hard_cap,
                    )
                    for start in range(0, runs, size)
                ]
                records = [record for future in futures for record in future.result()]

        summary = ExperimentSummary.from_records(
            chart.method, design.gen1.sigma, design.gen1.p, records
        )
        logger.info(
            "Experiment cell finished",
            method=chart.method.value,
            sigma=design.gen1.sigma,
            p=design.gen1.p,
            runs=runs,
            arl=summary.arl,
            truncated_runs=summary.truncated_runs,
        )
        return records, summary
