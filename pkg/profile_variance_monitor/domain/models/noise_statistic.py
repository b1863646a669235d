from dataclasses import dataclass
from enum import Enum

from profile_variance_monitor.domain.exceptions.estimation_exceptions import (
    EstimationError,
)


class EstimationMethod(Enum):
    VAR = "var"
    MAD = "mad"
    PSE = "pse"

    @classmethod
    def from_name(cls, name: str) -> "EstimationMethod":
        try:
            return cls(name.strip().lower())
        except ValueError as e:
            known = ", ".join(method.value for method in cls)
            raise ValueError(f"Unknown method {name!r}; expected one of {known}") from e

    def to_display_string(self) -> str:
        return self.value.capitalize() if self is EstimationMethod.VAR else self.name


@dataclass(frozen=True)
class NoiseStatistic:
    """
    Per-profile scale statistic computed from the finest-detail block.

    ``value`` is the sample variance s^2 for VAR and a scale s for MAD and
    PSE. ``m`` is the number of coefficients before trimming. PSE carries the
    pre-trim scale ``s0`` and the number ``n_kept`` of surviving coefficients.
    """

    method: EstimationMethod
    value: float
    m: int
    s0: float | None = None
    n_kept: int | None = None

    def __post_init__(self):
        if not self.value >= 0:
            raise EstimationError(f"Statistic value must be nonnegative, got {self.value}")
        if self.m < 1:
            raise EstimationError(f"Coefficient count must be positive, got {self.m}")
        if self.method is EstimationMethod.PSE:
            if self.s0 is None or self.n_kept is None:
                raise EstimationError("PSE statistics require s0 and the kept count")
            if not self.s0 >= 0:
                raise EstimationError(f"PSE s0 must be nonnegative, got {self.s0}")
            if not 1 <= self.n_kept <= self.m:
                raise EstimationError(
                    f"PSE kept count must lie in [1, {self.m}], got {self.n_kept}"
                )
