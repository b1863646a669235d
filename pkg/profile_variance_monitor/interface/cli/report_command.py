import argparse
import sys
from pathlib import Path

import pandas as pd

from profile_variance_monitor.common.config import MonitorSettings
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.input_exceptions import RecordFormatError
from profile_variance_monitor.interface.cli.errors import EXIT_SUCCESS
from profile_variance_monitor.interface.cli.simulate_command import (
    COMMENT_PREFIX,
    sidecar_paths,
)
from profile_variance_monitor.interface.schemas.records import ExperimentMetadata

logger = StructuredLogger(__name__)

SCATTER_COLUMNS = ["p", "sigma", "method", "run", "run_length"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="Render a stored results file")
    parser.add_argument("--results", required=True, type=Path, help="CSV from 'simulate'")
    parser.add_argument("--metadata", type=Path, help="Sidecar (default next to results)")
    parser.add_argument("--run-lengths", type=Path, help="Run-length file to plot")
    parser.add_argument(
        "--scatter", type=Path, help="Write run lengths as whitespace-delimited plot data"
    )
    parser.add_argument("--decimals", type=int, default=2)
    parser.set_defaults(handler=handle, overrides=lambda args: {})


def read_results(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, comment="#")
    except FileNotFoundError as e:
        raise RecordFormatError(str(path), "file not found") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise RecordFormatError(str(path), str(e)) from e


def read_metadata(path: Path) -> ExperimentMetadata:
    try:
        return ExperimentMetadata.model_validate_json(path.read_text())
    except FileNotFoundError as e:
        raise RecordFormatError(str(path), "file not found") from e
    except ValueError as e:
        raise RecordFormatError(str(path), str(e)) from e


def embedded_metadata(path: Path) -> ExperimentMetadata | None:
    """Metadata from the leading comment of a table captured from stdout, if any."""
    with path.open() as handle:
        first = handle.readline()
    if not first.startswith(COMMENT_PREFIX):
        return None
    try:
        return ExperimentMetadata.model_validate_json(first[len(COMMENT_PREFIX) :])
    except ValueError as e:
        raise RecordFormatError(str(path), f"unreadable metadata comment: {e}") from e


def render_table(
    frame: pd.DataFrame, metadata: ExperimentMetadata | None = None, decimals: int = 2
) -> str:
    """Aligned text rendering of a results frame, headed by its metadata when known."""
    lines = []
    if metadata is not None:
        lines.append(f"{metadata.table_id}: {metadata.title}")
        lines.append(
            f"n = {metadata.n}, tau = {metadata.tau}, runs = {metadata.runs}, "
            f"seed = {metadata.seed}, basis = {metadata.basis}"
        )
        limits = ", ".join(f"{m}: {v:.4f}" for m, v in metadata.log_ucls.items())
        lines.append(f"log UCL {limits}")
        lines.append("")
    lines.append(
        frame.to_string(index=False, float_format=lambda value: f"{value:.{decimals}f}")
    )
    return "\n".join(lines) + "\n"


def scatter_data(run_lengths: pd.DataFrame) -> str:
    missing = [column for column in SCATTER_COLUMNS if column not in run_lengths]
    if missing:
        raise RecordFormatError("run-length file", f"missing columns {missing}")
    selected = run_lengths[SCATTER_COLUMNS]
    return selected.to_csv(sep=" ", index=False)


def handle(args: argparse.Namespace, settings: MonitorSettings) -> int:
    frame = read_results(args.results)
    default_metadata, default_runs = sidecar_paths(args.results)

    metadata_path = args.metadata or default_metadata
    if metadata_path.is_file():
        metadata = read_metadata(metadata_path)
    elif args.metadata is not None:
        raise RecordFormatError(str(args.metadata), "file not found")
    else:
        metadata = embedded_metadata(args.results)

    sys.stdout.write(render_table(frame, metadata, args.decimals))

    if args.scatter is not None:
        runs_path = args.run_lengths or default_runs
        args.scatter.parent.mkdir(parents=True, exist_ok=True)
        args.scatter.write_text(scatter_data(read_results(runs_path)))
        logger.info("Run-length plot data written", path=str(args.scatter))
    return EXIT_SUCCESS
