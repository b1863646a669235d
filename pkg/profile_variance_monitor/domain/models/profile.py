from dataclasses import dataclass, field

import numpy as np

from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    InvalidProfileError,
    MalformedDecompositionError,
    NonDyadicLengthError,
)

MIN_TRANSFORM_LENGTH = 2
MIN_MONITORED_LENGTH = 16


def dyadic_level(length: int, minimum: int = MIN_TRANSFORM_LENGTH) -> int:
    """Returns J with length == 2**J, or raises for non-dyadic lengths."""
    if length < minimum or length & (length - 1):
        raise NonDyadicLengthError(length, minimum)
    return length.bit_length() - 1


@dataclass(frozen=True)
class Profile:
    """
    One observed functional response y^t sampled at n = 2^J points.

    ``index`` is the position of the profile in the monitored sequence.
    Values are copied and frozen on construction.
    """

    values: np.ndarray
    index: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidProfileError(
                f"Profile values must be one-dimensional, got shape {values.shape}"
            )
        dyadic_level(values.size)
        if not np.all(np.isfinite(values)):
            raise InvalidProfileError(f"Profile {self.index} contains non-finite values")
        if self.index < 0:
            raise InvalidProfileError(f"Profile index must be nonnegative, got {self.index}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def levels(self) -> int:
        return dyadic_level(self.n)


@dataclass(frozen=True)
class WaveletBasisSpec:
    """Identifier of a compactly supported orthonormal wavelet family member."""

    name: str = "db4"

    def __post_init__(self):
        object.__setattr__(self, "name", self.name.strip().lower())


@dataclass(frozen=True)
class WaveletDecomposition:
    """
    Orthonormal DWT coefficients laid out as

        [xi_{j0} | theta_{j0} | theta_{j0+1} | ... | theta_{J-1}]

    with block lengths 2^j0, 2^j0, 2^(j0+1), ..., 2^(J-1).
    """

    coefficients: np.ndarray
    j0: int
    basis: str = "db4"
    levels: int = field(init=False)

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float)
        if coefficients.ndim != 1:
            raise MalformedDecompositionError(
                f"Coefficients must be one-dimensional, got shape {coefficients.shape}"
            )
        try:
            levels = dyadic_level(coefficients.size)
        except NonDyadicLengthError as e:
            raise MalformedDecompositionError(
                f"Coefficient vector length {coefficients.size} is not a power of two"
            ) from e
        if not 0 <= self.j0 <= levels - 1:
            raise MalformedDecompositionError(
                f"j0={self.j0} is inconsistent with {coefficients.size} coefficients"
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "levels", levels)

    @property
    def n(self) -> int:
        return int(self.coefficients.size)

    def block_lengths(self) -> list[int]:
        return [2**self.j0] + [2**j for j in range(self.j0, self.levels)]

    def blocks(self) -> list[np.ndarray]:
        """Returns copies of the level blocks in layout order."""
        boundaries = np.cumsum(self.block_lengths())[:-1]
        return [block.copy() for block in np.split(self.coefficients, boundaries)]

    def finest_detail(self) -> np.ndarray:
        """The theta_{J-1} block: the last n/2 coefficients, by value."""
        return self.coefficients[self.n // 2 :].copy()

    @classmethod
    def from_blocks(
        cls, blocks: list[np.ndarray], basis: str = "db4"
    ) -> "WaveletDecomposition":
        if len(blocks) < 2:
            raise MalformedDecompositionError(
                "A decomposition needs a scaling block and at least one detail block"
            )
        j0 = int(np.log2(max(len(blocks[0]), 1)))
        expected = [2**j0] + [2**j for j in range(j0, j0 + len(blocks) - 1)]
        actual = [len(block) for block in blocks]
        if actual != expected:
            raise MalformedDecompositionError(
                f"Block lengths {actual} do not match the dyadic layout {expected}"
            )
        return cls(np.concatenate(blocks), j0=j0, basis=basis)
