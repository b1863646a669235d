import math
from dataclasses import dataclass, field

import numpy as np

from profile_variance_monitor.domain.exceptions.experiment_exceptions import (
    InvalidGenerationSpecError,
    UnknownTableError,
)
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    NonDyadicLengthError,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.models.profile import (
    MIN_MONITORED_LENGTH,
    dyadic_level,
)

DEFAULT_RUN_HARD_CAP = 10_000


@dataclass(frozen=True)
class ProfileGenSpec:
    """
    Random contaminated profile generator.

    A fraction ``p`` of the finest-detail coefficients carries structure of
    size ``size_mult * sigma * sqrt(2 ln n)``; coarser levels (scaling block
    included) are Uniform(-5, 5); noise is Normal(0, sigma^2).
    """

    n: int
    p: float = 0.0
    size_mult: float = 3.0
    sigma: float = 1.0
    basis: str = "db4"
    j0: int = 0

    def __post_init__(self):
        try:
            levels = dyadic_level(self.n, MIN_MONITORED_LENGTH)
        except NonDyadicLengthError as e:
            raise InvalidGenerationSpecError(e.message) from e
        if not 0 <= self.p < 0.5:
            raise InvalidGenerationSpecError(
                f"structure proportion p must lie in [0, 0.5), got {self.p}"
            )
        if not self.sigma > 0:
            raise InvalidGenerationSpecError(f"sigma must be positive, got {self.sigma}")
        if self.size_mult < 0:
            raise InvalidGenerationSpecError(
                f"structural size multiplier must be nonnegative, got {self.size_mult}"
            )
        if not 0 <= self.j0 <= levels - 1:
            raise InvalidGenerationSpecError(
                f"j0={self.j0} is out of range for n={self.n}"
            )

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def structural_count(self) -> int:
        """N_s = ceil(p * n / 2); the rounding absorbs binary noise in p * m."""
        return math.ceil(round(self.p * self.m, 9))

    @property
    def structural_size(self) -> float:
        return self.size_mult * self.sigma * math.sqrt(2.0 * math.log(self.n))

    def with_sigma(self, sigma: float) -> "ProfileGenSpec":
        return ProfileGenSpec(
            n=self.n,
            p=self.p,
            size_mult=self.size_mult,
            sigma=sigma,
            basis=self.basis,
            j0=self.j0,
        )


@dataclass(frozen=True)
class RunRecord:
    """
    One simulated monitoring run.

    ``tau_hat`` is on the original timeline (restart offsets added back);
    ``local_tau_hat`` is relative to the last restart. ``restarts`` holds the
    residual changepoint after each false alarm.
    """

    run_length: int
    tau_hat: int | None
    local_tau_hat: int | None
    sigma_hat: float | None
    false_alarms: int
    restarts: tuple[int, ...] = ()
    truncated: bool = False
    profiles_used: int = 0

    def __post_init__(self):
        if self.false_alarms != len(self.restarts):
            raise InvalidGenerationSpecError(
                "false alarm count must equal the number of restarts"
            )
        if not self.truncated and self.run_length < 1:
            raise InvalidGenerationSpecError(
                f"a signaled run has run length >= 1, got {self.run_length}"
            )


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return mean, se


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregates of one table cell: a method at one (p, sigma) setting."""

    method: EstimationMethod
    sigma: float
    p: float
    runs: int
    arl: float
    arl_se: float
    tau_hat: float
    tau_hat_se: float
    sigma_hat: float
    sigma_hat_se: float
    false_alarm_rate: float
    false_alarm_mean: float
    truncated_runs: int

    @classmethod
    def from_records(
        cls, method: EstimationMethod, sigma: float, p: float, records: list[RunRecord]
    ) -> "ExperimentSummary":
        signaled = [record for record in records if not record.truncated]
        run_lengths = np.array([record.run_length for record in records], dtype=float)
        tau_hats = np.array([record.tau_hat for record in signaled], dtype=float)
        sigma_hats = np.array([record.sigma_hat for record in signaled], dtype=float)
        alarms = np.array([record.false_alarms for record in records], dtype=float)

        arl, arl_se = _mean_and_se(run_lengths)
        tau_hat, tau_hat_se = _mean_and_se(tau_hats)
        sigma_hat, sigma_hat_se = _mean_and_se(sigma_hats)
        with_alarms = alarms[alarms > 0]
        return cls(
            method=method,
            sigma=sigma,
            p=p,
            runs=len(records),
            arl=arl,
            arl_se=arl_se,
            tau_hat=tau_hat,
            tau_hat_se=tau_hat_se,
            sigma_hat=sigma_hat,
            sigma_hat_se=sigma_hat_se,
            false_alarm_rate=float(np.mean(alarms > 0)) if alarms.size else math.nan,
            false_alarm_mean=float(np.mean(with_alarms)) if with_alarms.size else math.nan,
            truncated_runs=len(records) - len(signaled),
        )


SIGMA_GRID = (2.00, 1.50, 1.25, 1.10, 0.90, 0.75, 0.50)
ALL_METHODS = (EstimationMethod.VAR, EstimationMethod.MAD, EstimationMethod.PSE)

# Published NEWMA ARLs at n = 256, tau = 0, used only as a comparison column
NEWMA_REFERENCE_ARL = {1.1: 4.14, 0.7: 1.43}


@dataclass(frozen=True)
class TableLayout:
    table_id: str
    title: str
    n: int
    size_mult: float
    tau: int
    p_values: tuple[float, ...]
    sigmas: tuple[float, ...] = SIGMA_GRID
    methods: tuple[EstimationMethod, ...] = ALL_METHODS
    default_runs: int = 100
    false_alarm_columns: bool = False
    reference: dict[float, float] = field(default_factory=dict)

    @property
    def cells(self) -> list[tuple[float, float]]:
        return [(p, sigma) for p in self.p_values for sigma in self.sigmas]


TABLE_LAYOUTS: dict[str, TableLayout] = {
    "T1": TableLayout(
        table_id="T1",
        title="ARL, tau_hat and sigma_hat, structure size sigma*sqrt(2 ln n), n = 512",
        n=512,
        size_mult=1.0,
        tau=0,
        p_values=(0.0, 0.01, 0.05),
    ),
    "T2": TableLayout(
        table_id="T2",
        title="ARL, tau_hat and sigma_hat, structure size 3*sigma*sqrt(2 ln n), n = 512",
        n=512,
        size_mult=3.0,
        tau=0,
        p_values=(0.0, 0.01, 0.05),
    ),
    "T3": TableLayout(
        table_id="T3",
        title="Changepoint after 20 profiles with false alarm restarts, n = 1024",
        n=1024,
        size_mult=3.0,
        tau=20,
        p_values=(0.0, 0.01, 0.05),
        false_alarm_columns=True,
    ),
    "T4": TableLayout(
        table_id="T4",
        title="Heavy contamination p = 0.30, PSE chart, n = 1024",
        n=1024,
        size_mult=3.0,
        tau=20,
        p_values=(0.30,),
        methods=(EstimationMethod.PSE,),
        false_alarm_columns=True,
    ),
    "T5-partial": TableLayout(
        table_id="T5-partial",
        title="ARL against the published NEWMA chart, n = 256",
        n=256,
        size_mult=3.0,
        tau=0,
        p_values=(0.0,),
        sigmas=(1.1, 0.7),
        methods=(EstimationMethod.PSE, EstimationMethod.VAR),
        default_runs=1000,
        reference=NEWMA_REFERENCE_ARL,
    ),
}


def table_layout(table_id: str) -> TableLayout:
    key = table_id.strip().upper().replace("T5-PARTIAL", "T5-partial")
    if key == "T5":
        key = "T5-partial"
    try:
        return TABLE_LAYOUTS[key]
    except KeyError as e:
        raise UnknownTableError(table_id, list(TABLE_LAYOUTS)) from e
