from collections.abc import Callable
from functools import wraps

from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.base import DomainError
from profile_variance_monitor.domain.exceptions.chart_exceptions import (
    InvalidChartParameterError,
)
from profile_variance_monitor.domain.exceptions.estimation_exceptions import (
    EstimationError,
)
from profile_variance_monitor.domain.exceptions.experiment_exceptions import (
    CalibrationError,
    InvalidCalibrationSpecError,
    InvalidGenerationSpecError,
    UnknownTableError,
)
from profile_variance_monitor.domain.exceptions.input_exceptions import (
    ConfigurationError,
    InputError,
)
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    InvalidLevelError,
    InvalidProfileError,
    MalformedDecompositionError,
    NonDyadicLengthError,
    UnknownBasisError,
)
from profile_variance_monitor.domain.models.monitoring_result import (
    ErrorSeverity,
    ErrorSource,
    MonitoringResult,
)

logger = StructuredLogger(__name__)

EXIT_SUCCESS = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

# Checked in order: subclasses before their bases
_EXIT_CODES: list[tuple[type[DomainError], int]] = [
    (ConfigurationError, EXIT_USAGE),
    (InvalidCalibrationSpecError, EXIT_USAGE),
    (InvalidGenerationSpecError, EXIT_USAGE),
    (UnknownTableError, EXIT_USAGE),
    (UnknownBasisError, EXIT_USAGE),
    (InvalidLevelError, EXIT_USAGE),
    (NonDyadicLengthError, EXIT_USAGE),
    (InvalidChartParameterError, EXIT_USAGE),
    (InputError, EXIT_DATA),
    (InvalidProfileError, EXIT_DATA),
    (MalformedDecompositionError, EXIT_DATA),
    (EstimationError, EXIT_NUMERICAL),
    (CalibrationError, EXIT_NUMERICAL),
]

_RESULT_EXIT_CODES = {
    ErrorSource.INPUT: EXIT_DATA,
    ErrorSource.WAVELET: EXIT_DATA,
    ErrorSource.ESTIMATION: EXIT_NUMERICAL,
    ErrorSource.CHART: EXIT_NUMERICAL,
}


def exit_code_for(error: DomainError) -> int:
    for error_type, code in _EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_NUMERICAL


def exit_code_for_result(result: MonitoringResult) -> int:
    """Maps the first critical error of a monitoring run to an exit status."""
    if not result.has_critical_errors:
        return EXIT_SUCCESS
    first = next(error for error in result.errors if error.severity is ErrorSeverity.ERROR)
    return _RESULT_EXIT_CODES.get(first.source, EXIT_NUMERICAL)


def domain_errors(handler: Callable[..., int]) -> Callable[..., int]:
    """
    Turns domain exceptions escaping a command into their exit status,
    without leaking tracebacks to the user.
    """

    @wraps(handler)
    def wrapper(*args, **kwargs) -> int:
        try:
            return handler(*args, **kwargs)
        except DomainError as e:
            code = exit_code_for(e)
            logger.error(
                "command_failed",
                command=handler.__name__,
                error=e.message,
                error_type=type(e).__name__,
                exit_code=code,
            )
            return code

    return wrapper
