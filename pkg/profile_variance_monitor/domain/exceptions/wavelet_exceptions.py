from profile_variance_monitor.domain.exceptions.base import DomainError


class WaveletError(DomainError):
    """Base class for all wavelet transform exceptions."""

    pass


class NonDyadicLengthError(WaveletError):
    """Raised when a signal length is not an exact power of two."""

    def __init__(self, length: int, minimum: int = 2):
        self.length = length
        self.minimum = minimum
        self.message = (
            f"Profile length must be a power of two of at least {minimum}, "
            f"but got {length}."
        )
        super().__init__(self.message)


class InvalidLevelError(WaveletError):
    """Raised when the coarsest level j0 lies outside [0, J - 1]."""

    def __init__(self, j0: int, max_level: int):
        self.j0 = j0
        self.max_level = max_level
        self.message = f"Coarsest level j0 must be between 0 and {max_level}, got {j0}."
        super().__init__(self.message)


class UnknownBasisError(WaveletError):
    """Raised when a basis identifier does not name an orthogonal wavelet."""

    def __init__(self, name: str, reason: str = "unknown wavelet"):
        self.name = name
        self.message = f"Unsupported wavelet basis {name!r}: {reason}."
        super().__init__(self.message)


class MalformedDecompositionError(WaveletError):
    """Raised when a coefficient vector does not match the block layout."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class InvalidProfileError(WaveletError):
    """Raised when profile values are not all finite."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)
