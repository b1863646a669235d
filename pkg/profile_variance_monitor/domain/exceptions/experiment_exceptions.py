from profile_variance_monitor.domain.exceptions.base import DomainError


class ExperimentError(DomainError):
    """Base class for calibration and simulation exceptions."""

    pass


class InvalidCalibrationSpecError(ExperimentError):
    """Raised when a calibration request violates its invariants."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class CalibrationError(ExperimentError):
    """Base class for failures of the control limit search."""

    pass


class NonBracketingIntervalError(CalibrationError):
    """Raised when no upper control limit reaches the target ARL."""

    def __init__(self, target_arl: float, best_arl: float, log_ucl: float):
        self.target_arl = target_arl
        self.best_arl = best_arl
        self.log_ucl = log_ucl
        self.message = (
            f"Search interval does not bracket the target ARL {target_arl:g}: "
            f"log UCL {log_ucl:.4f} only reaches ARL {best_arl:.2f}."
        )
        super().__init__(self.message)


class ExcessiveTruncationError(CalibrationError):
    """Raised when too many in-control runs hit the run length cap."""

    def __init__(self, truncated: int, runs: int, cap: int):
        self.truncated = truncated
        self.runs = runs
        self.cap = cap
        self.message = (
            f"{truncated} of {runs} calibration runs reached the cap of {cap} "
            f"profiles (limit is 5%); raise max_run_length."
        )
        super().__init__(self.message)


class InvalidGenerationSpecError(ExperimentError):
    """Raised when profile generation settings are invalid."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class UnknownTableError(ExperimentError):
    """Raised when a table identifier has no layout."""

    def __init__(self, table_id: str, known: list[str]):
        self.table_id = table_id
        self.message = f"Unknown table {table_id!r}; expected one of {', '.join(known)}."
        super().__init__(self.message)
