from profile_variance_monitor.domain.exceptions.base import DomainError


class EstimationError(DomainError):
    """Base class for scale estimator and density exceptions."""

    pass


class EmptyDetailError(EstimationError):
    """Raised when an estimator receives no coefficients."""

    def __init__(self, method: str):
        self.method = method
        self.message = f"{method} estimator requires a nonempty coefficient vector."
        super().__init__(self.message)


class InsufficientLengthError(EstimationError):
    """Raised when a coefficient vector is too short or has the wrong parity."""

    def __init__(self, method: str, length: int, requirement: str):
        self.method = method
        self.length = length
        self.message = f"{method} estimator requires {requirement}, got length {length}."
        super().__init__(self.message)


class DegenerateScaleError(EstimationError):
    """Raised when a robust scale collapses to zero or trims every coefficient."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class DensityError(EstimationError):
    """Base class for density evaluation and construction failures."""

    pass


class InvalidDensityArgumentError(DensityError):
    """Raised when a density is queried outside its domain."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class DensityNormalizationError(DensityError):
    """Raised when a tabulated density fails its normalization check."""

    def __init__(self, m: int, integral: float, tolerance: float):
        self.m = m
        self.integral = integral
        self.message = (
            f"MAD density table for m={m} integrates to {integral:.8f}, "
            f"outside 1 +/- {tolerance:g}."
        )
        super().__init__(self.message)
