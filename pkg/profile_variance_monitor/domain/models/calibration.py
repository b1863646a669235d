import math
from dataclasses import dataclass, field

from profile_variance_monitor.domain.exceptions.experiment_exceptions import (
    InvalidCalibrationSpecError,
)
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    NonDyadicLengthError,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.models.profile import (
    MIN_MONITORED_LENGTH,
    dyadic_level,
)

MIN_CALIBRATION_RUNS = 500
MIN_CAP_MULTIPLE = 10
MIN_M0_DRAWS = 100_000


@dataclass(frozen=True)
class CalibrationSpec:
    """
    In-control run length experiment used to tune the UCL.

    ``max_run_length`` defaults to ten times the target ARL.
    """

    method: EstimationMethod
    n: int
    sigma0: float = 1.0
    target_arl: float = 200.0
    runs: int = 2000
    max_run_length: int | None = None
    seed: int = 0
    tolerance: float = 0.05
    m0_draws: int = 1_000_000
    window: int | None = None

    def __post_init__(self):
        try:
            dyadic_level(self.n, MIN_MONITORED_LENGTH)
        except NonDyadicLengthError as e:
            raise InvalidCalibrationSpecError(e.message) from e
        if not self.sigma0 > 0:
            raise InvalidCalibrationSpecError(f"sigma0 must be positive, got {self.sigma0}")
        if not self.target_arl > 1:
            raise InvalidCalibrationSpecError(
                f"target ARL must exceed 1, got {self.target_arl}"
            )
        if self.runs < MIN_CALIBRATION_RUNS:
            raise InvalidCalibrationSpecError(
                f"calibration needs at least {MIN_CALIBRATION_RUNS} runs, got {self.runs}"
            )
        if not 0 < self.tolerance < 1:
            raise InvalidCalibrationSpecError(
                f"tolerance must lie in (0, 1), got {self.tolerance}"
            )
        if self.m0_draws < MIN_M0_DRAWS:
            raise InvalidCalibrationSpecError(
                f"m0 estimation needs at least {MIN_M0_DRAWS} draws, got {self.m0_draws}"
            )

        cap = self.max_run_length
        if cap is None:
            cap = math.ceil(MIN_CAP_MULTIPLE * self.target_arl)
            object.__setattr__(self, "max_run_length", cap)
        if cap < MIN_CAP_MULTIPLE * self.target_arl:
            raise InvalidCalibrationSpecError(
                f"max_run_length must be at least {MIN_CAP_MULTIPLE} x target ARL "
                f"({MIN_CAP_MULTIPLE * self.target_arl:g}), got {cap}"
            )

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def cap(self) -> int:
        assert self.max_run_length is not None
        return self.max_run_length


@dataclass(frozen=True)
class InControlMean:
    """m0: the in-control mean of a statistic at sigma0, with its standard error."""

    method: EstimationMethod
    m: int
    sigma0: float
    value: float
    std_err: float
    draws: int


@dataclass(frozen=True)
class ArlEstimate:
    arl: float
    std_err: float
    truncated_runs: int
    runs: int


@dataclass(frozen=True)
class CalibrationResult:
    """
    Outcome of a UCL search. ``log_ucl`` is the UCL on the log
    likelihood-ratio scale; ``converged`` is False when the ARL step
    function never came within tolerance of the target. ``window`` is the
    chart history cap the limit holds for.
    """

    method: EstimationMethod
    n: int
    sigma0: float
    log_ucl: float
    achieved_arl: float
    arl_std_err: float
    m0: float
    m0_std_err: float
    truncated_runs: int
    converged: bool
    target_arl: float
    runs: int
    max_run_length: int
    seed: int
    tolerance: float
    validation_arl: float | None = None
    validation_std_err: float | None = None
    window: int | None = None
    metadata: dict = field(default_factory=dict)
