import argparse
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from profile_variance_monitor.application.services.statistic_pipeline import (
    StatisticPipeline,
)
from profile_variance_monitor.application.use_cases.calibrate_control_limit import (
    estimate_m0,
)
from profile_variance_monitor.application.use_cases.monitor_profiles import (
    MonitorProfilesUseCase,
    SignalPolicy,
)
from profile_variance_monitor.common.config import MonitorSettings
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.input_exceptions import (
    ConfigurationError,
)
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    NonDyadicLengthError,
)
from profile_variance_monitor.domain.models.chart import ChartEvent
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.models.profile import (
    MIN_MONITORED_LENGTH,
    WaveletBasisSpec,
    dyadic_level,
)
from profile_variance_monitor.domain.services.changepoint_chart import ChangepointChart
from profile_variance_monitor.infrastructure.converters.profile_reader import (
    DelimitedProfileReader,
)
from profile_variance_monitor.interface.cli import dependencies
from profile_variance_monitor.interface.cli.errors import (
    EXIT_SUCCESS,
    exit_code_for_result,
)
from profile_variance_monitor.interface.schemas.records import (
    ChartEventRecord,
    SignalSummaryRecord,
    StreamHeaderRecord,
)

logger = StructuredLogger(__name__)


@dataclass(frozen=True)
class MonitorConfig:
    method: EstimationMethod
    sigma0: float
    n: int
    basis: str
    input_path: Path
    output_path: Path | None = None
    ucl: float | None = None
    log_ucl: float | None = None
    calibration_path: Path | None = None
    m0: float | None = None
    window: int | None = None
    j0: int = 0
    on_signal: SignalPolicy = SignalPolicy.STOP
    seed: int = 0

    def __post_init__(self):
        try:
            dyadic_level(self.n, MIN_MONITORED_LENGTH)
        except NonDyadicLengthError as e:
            raise ConfigurationError(e.message) from e
        limits = [self.ucl, self.log_ucl, self.calibration_path]
        if sum(limit is not None for limit in limits) != 1:
            raise ConfigurationError(
                "provide exactly one of --ucl, --log-ucl or --calibration"
            )
        if self.ucl is not None and not self.ucl > 0:
            raise ConfigurationError(f"UCL must be positive, got {self.ucl}")
        if not self.sigma0 > 0:
            raise ConfigurationError(f"sigma0 must be positive, got {self.sigma0}")
        if self.m0 is not None and not self.m0 > 0:
            raise ConfigurationError(f"m0 must be positive, got {self.m0}")
        if self.window is not None and self.window < 1:
            raise ConfigurationError(f"window must be at least 1, got {self.window}")
        if not self.input_path.is_file():
            raise ConfigurationError(f"input file not found: {self.input_path}")


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "monitor",
        help="Monitor a file of profiles with a calibrated changepoint chart",
    )
    parser.add_argument("--input", required=True, type=Path, help="One profile per line")
    parser.add_argument("--output", type=Path, help="Event stream file (default stdout)")
    parser.add_argument(
        "--method", required=True, choices=[m.value for m in EstimationMethod]
    )
    parser.add_argument("--n", required=True, type=int, help="Profile length, a power of two")
    parser.add_argument("--sigma0", type=float, help="Known in-control noise level")
    limit = parser.add_mutually_exclusive_group()
    limit.add_argument("--ucl", type=float, help="UCL on the likelihood-ratio scale")
    limit.add_argument("--log-ucl", type=float, help="UCL on the log scale")
    limit.add_argument("--calibration", type=Path, help="Calibration file from 'calibrate'")
    parser.add_argument("--m0", type=float, help="In-control statistic mean")
    parser.add_argument("--basis", help="PyWavelets orthogonal wavelet name")
    parser.add_argument("--j0", type=int)
    parser.add_argument("--window", type=int, help="Keep only the last W statistics")
    parser.add_argument(
        "--on-signal",
        choices=[policy.value for policy in SignalPolicy],
        default=SignalPolicy.STOP.value,
    )
    parser.add_argument("--seed", type=int, default=0, help="Seed for m0 estimation")
    parser.set_defaults(handler=handle, overrides=overrides)


def overrides(args: argparse.Namespace) -> dict:
    return {
        "basis": args.basis,
        "j0": args.j0,
        "sigma0": args.sigma0,
        "chart_window": args.window,
    }


def build_config(args: argparse.Namespace, settings: MonitorSettings) -> MonitorConfig:
    return MonitorConfig(
        method=EstimationMethod.from_name(args.method),
        sigma0=settings.sigma0,
        n=args.n,
        basis=settings.basis,
        input_path=args.input,
        output_path=args.output,
        ucl=args.ucl,
        log_ucl=args.log_ucl,
        calibration_path=args.calibration,
        m0=args.m0,
        window=settings.chart_window,
        j0=settings.j0,
        on_signal=SignalPolicy(args.on_signal),
        seed=args.seed,
    )


def build_chart(config: MonitorConfig, settings: MonitorSettings) -> ChangepointChart:
    m = config.n // 2
    m0 = config.m0
    if config.calibration_path is not None:
        calibration = dependencies.check_calibration(
            dependencies.read_calibration(config.calibration_path),
            config.method,
            config.n,
            config.sigma0,
            window=config.window,
        )
        log_ucl = calibration.log_ucl
        m0 = m0 or calibration.m0
    elif config.log_ucl is not None:
        log_ucl = config.log_ucl
    else:
        assert config.ucl is not None
        log_ucl = math.log(config.ucl)

    if m0 is None:
        m0 = estimate_m0(config.method, m, config.sigma0, settings.m0_draws, config.seed).value

    return ChangepointChart(
        density=dependencies.get_density_provider(settings.density_cache_dir).density(
            config.method, m
        ),
        sigma0=config.sigma0,
        log_ucl=log_ucl,
        m0=m0,
        window=config.window,
    )


@contextmanager
def _open_output(path: Path | None):
    if path is None:
        yield sys.stdout
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as handle:
        yield handle


def _write(stream: TextIO, record) -> None:
    stream.write(record.model_dump_json() + "\n")
    stream.flush()


def handle(args: argparse.Namespace, settings: MonitorSettings) -> int:
    config = build_config(args, settings)
    chart = build_chart(config, settings)
    use_case = MonitorProfilesUseCase(
        source=DelimitedProfileReader.from_path(config.input_path),
        pipeline=StatisticPipeline(
            dependencies.get_transform(), config.method, WaveletBasisSpec(config.basis), config.j0
        ),
        chart=chart,
        policy=config.on_signal,
    )

    with _open_output(config.output_path) as stream:
        _write(
            stream,
            StreamHeaderRecord(
                method=config.method.value,
                n=config.n,
                sigma0=config.sigma0,
                log_ucl=chart.log_ucl,
                m0=chart.m0,
                basis=config.basis,
                window=config.window,
                seed=config.seed,
            ),
        )

        def sink(event: ChartEvent) -> None:
            _write(stream, ChartEventRecord.from_event(event))
            if event.signaled:
                assert event.tau_hat is not None and event.sigma_hat is not None
                summary = SignalSummaryRecord(
                    t=event.t, tau_hat=event.tau_hat, sigma_hat=event.sigma_hat
                )
                _write(stream, summary)

        result = use_case.execute(config.n, sink)

    logger.info("Monitoring finished", **result.metadata)
    if result.has_errors:
        return exit_code_for_result(result)
    return EXIT_SUCCESS
