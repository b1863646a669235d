from profile_variance_monitor.domain.exceptions.base import DomainError


class InputError(DomainError):
    """Base class for errors in files and configuration supplied by users."""

    pass


class ProfileFormatError(InputError):
    """Raised when a profile record cannot be parsed."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        self.message = f"Line {line_number}: {reason}"
        super().__init__(self.message)


class ProfileLengthMismatchError(ProfileFormatError):
    """Raised when a profile record has the wrong number of values."""

    def __init__(self, line_number: int, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(
            line_number, f"expected {expected} values per profile, got {actual}"
        )


class ConfigurationError(InputError):
    """Raised when configuration values or combinations are invalid."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class RecordFormatError(InputError):
    """Raised when a stored result or calibration file cannot be read."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.message = f"Cannot read {path}: {reason}"
        super().__init__(self.message)
