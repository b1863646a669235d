import argparse
import sys
from pathlib import Path

from profile_variance_monitor.application.use_cases.reproduce_table import (
    ReproduceTableUseCase,
    TableResult,
)
from profile_variance_monitor.common.config import MonitorSettings
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.models.profile import WaveletBasisSpec
from profile_variance_monitor.domain.models.simulation import TABLE_LAYOUTS
from profile_variance_monitor.interface.cli import dependencies
from profile_variance_monitor.interface.cli.errors import EXIT_SUCCESS
from profile_variance_monitor.interface.schemas.records import ExperimentMetadata

logger = StructuredLogger(__name__)

FLOAT_FORMAT = "%.6g"
COMMENT_PREFIX = "# "


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "simulate", help="Reproduce a published ARL / changepoint estimate table"
    )
    parser.add_argument(
        "--table", required=True, help=f"One of {', '.join(TABLE_LAYOUTS)}"
    )
    parser.add_argument("--runs", type=int, help="Runs per cell (default from the table)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, help="Results CSV (default stdout)")
    parser.add_argument(
        "--calibration-dir",
        type=Path,
        default=Path("calibrations"),
        help="Calibration files are read from here, or written here when missing",
    )
    parser.add_argument("--basis")
    parser.add_argument("--workers", type=int)
    parser.set_defaults(handler=handle, overrides=overrides)


def overrides(args: argparse.Namespace) -> dict:
    return {"basis": args.basis, "workers": args.workers}


def sidecar_paths(out: Path) -> tuple[Path, Path]:
    """Metadata and run-length files written next to a results file."""
    return out.with_name(f"{out.stem}.meta.json"), out.with_name(f"{out.stem}.runs.csv")


def build_metadata(result: TableResult, settings: MonitorSettings) -> ExperimentMetadata:
    layout = result.layout
    return ExperimentMetadata(
        table_id=layout.table_id,
        title=layout.title,
        runs=result.runs,
        seed=result.seed,
        n=layout.n,
        tau=layout.tau,
        size_mult=layout.size_mult,
        sigma0=settings.sigma0,
        basis=settings.basis,
        methods=[method.value for method in layout.methods],
        log_ucls={m.value: c.log_ucl for m, c in result.calibrations.items()},
        m0={m.value: c.m0 for m, c in result.calibrations.items()},
        window=settings.chart_window,
        package_version=dependencies.package_version(),
    )


def handle(args: argparse.Namespace, settings: MonitorSettings) -> int:
    transform = dependencies.get_transform()
    use_case = ReproduceTableUseCase(
        experiments=dependencies.get_experiment_use_case(settings),
        transform=transform,
        densities=dependencies.get_density_provider(settings.density_cache_dir),
        calibrations=dependencies.stored_or_fresh_calibrations(
            settings, args.calibration_dir, args.seed
        ),
        basis=WaveletBasisSpec(settings.basis),
        j0=settings.j0,
        sigma0=settings.sigma0,
        window=settings.chart_window,
    )
    result = use_case.execute(args.table, runs=args.runs, seed=args.seed)
    frame = result.to_frame()
    metadata = build_metadata(result, settings)

    if args.out is None:
        # no sidecar on stdout: the metadata travels as a leading comment
        sys.stdout.write(f"{COMMENT_PREFIX}{metadata.model_dump_json()}\n")
        frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
        return EXIT_SUCCESS

    args.out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.out, index=False, float_format=FLOAT_FORMAT)
    metadata_path, runs_path = sidecar_paths(args.out)
    metadata_path.write_text(metadata.model_dump_json(indent=2) + "\n")
    result.run_length_frame().to_csv(runs_path, index=False, float_format=FLOAT_FORMAT)
    logger.info(
        "Table written",
        table_id=result.layout.table_id,
        path=str(args.out),
        metadata=str(metadata_path),
        run_lengths=str(runs_path),
    )
    return EXIT_SUCCESS
