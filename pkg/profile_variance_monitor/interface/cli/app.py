import argparse
from collections.abc import Sequence

from profile_variance_monitor import __version__
from profile_variance_monitor.common.config import (
    MonitorSettings,
    load_config,
    load_config_file,
)
from profile_variance_monitor.common.logging import LogLevel, configure_logging
from profile_variance_monitor.common.middleware import error_handling, with_run_id
from profile_variance_monitor.domain.exceptions.input_exceptions import (
    ConfigurationError,
)
from profile_variance_monitor.interface.cli import (
    calibrate_command,
    monitor_command,
    report_command,
    simulate_command,
)
from profile_variance_monitor.interface.cli.errors import EXIT_USAGE, domain_errors

COMMANDS = (monitor_command, calibrate_command, simulate_command, report_command)


class Application:
    def __init__(self, settings: MonitorSettings | None = None) -> None:
        self.settings = settings
        self.parser = argparse.ArgumentParser(
            prog="profile-variance-monitor",
            description="Wavelet-based changepoint charts for the noise variance of profiles",
        )
        self.register_options()
        self.register_commands()

    def register_options(self) -> None:
        self.parser.add_argument("--version", action="version", version=__version__)
        self.parser.add_argument("--config", help="Flat 'key = value' configuration file")
        self.parser.add_argument(
            "--log-level", choices=[level.name for level in LogLevel], type=str.upper
        )

    def register_commands(self) -> None:
        subparsers = self.parser.add_subparsers(dest="command", required=True)
        for command in COMMANDS:
            command.register(subparsers)

    def resolve_settings(self, args: argparse.Namespace) -> MonitorSettings:
        """Command-line flags override the config file, which overrides the environment."""
        settings = self.settings or load_config()
        if args.config:
            settings = settings.merged(load_config_file(args.config))
        settings = settings.merged(args.overrides(args))
        return settings.merged({"log_level": args.log_level})

    def dispatch(self, args: argparse.Namespace) -> int:
        settings = self.resolve_settings(args)
        try:
            configure_logging(LogLevel.from_name(settings.log_level))
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
        return args.handler(args, settings)

    def run(self, argv: Sequence[str] | None = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            # --help and --version exit with 0, parse errors with 2
            return EXIT_USAGE if e.code not in (0, None) else 0

        # Order matters: the run ID must be set before errors are logged
        return with_run_id(error_handling(domain_errors(self.dispatch)))(args)
