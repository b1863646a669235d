import argparse
import sys
from pathlib import Path

from profile_variance_monitor.common.config import MonitorSettings
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.models.calibration import CalibrationSpec
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.interface.cli import dependencies
from profile_variance_monitor.interface.cli.errors import EXIT_SUCCESS

logger = StructuredLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "calibrate", help="Tune the control limit to an in-control ARL target"
    )
    parser.add_argument(
        "--method", required=True, choices=[m.value for m in EstimationMethod]
    )
    parser.add_argument("--n", required=True, type=int, help="Profile length")
    parser.add_argument("--sigma0", type=float)
    parser.add_argument("--arl", type=float, help="Target in-control ARL")
    parser.add_argument("--runs", type=int, help="Monte Carlo runs per candidate UCL")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tolerance", type=float, help="Relative ARL tolerance")
    parser.add_argument("--max-run-length", type=int, help="Run length cap")
    parser.add_argument("--m0-draws", type=int)
    parser.add_argument("--window", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out", type=Path, help="Calibration file (default stdout)")
    parser.set_defaults(handler=handle, overrides=overrides)


def overrides(args: argparse.Namespace) -> dict:
    return {
        "sigma0": args.sigma0,
        "target_arl": args.arl,
        "calibration_runs": args.runs,
        "calibration_tolerance": args.tolerance,
        "m0_draws": args.m0_draws,
        "chart_window": args.window,
        "workers": args.workers,
    }


def handle(args: argparse.Namespace, settings: MonitorSettings) -> int:
    spec = CalibrationSpec(
        method=EstimationMethod.from_name(args.method),
        n=args.n,
        sigma0=settings.sigma0,
        target_arl=settings.target_arl,
        runs=settings.calibration_runs,
        max_run_length=args.max_run_length,
        seed=args.seed,
        tolerance=settings.calibration_tolerance,
        m0_draws=settings.m0_draws,
        window=settings.chart_window,
    )
    logger.info(
        "Calibrating control limit",
        method=spec.method.value,
        n=spec.n,
        target_arl=spec.target_arl,
        runs=spec.runs,
        seed=spec.seed,
    )
    result = dependencies.get_calibration_use_case(settings).execute(spec)

    text = dependencies.write_calibration(result, args.out)
    if args.out is None:
        sys.stdout.write(text + "\n")
    else:
        logger.info("Calibration written", path=str(args.out), log_ucl=result.log_ucl)
    return EXIT_SUCCESS
