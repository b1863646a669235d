from typing import Literal

from pydantic import BaseModel, Field

from profile_variance_monitor.domain.models.calibration import CalibrationResult
from profile_variance_monitor.domain.models.chart import ChartEvent
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod

RECORD_VERSION = 1


class ChartEventRecord(BaseModel):
    """
    One line of the monitor event stream.

    Field order is fixed so identical runs produce identical bytes.
    """

    record: Literal["event"] = "event"
    t: int = Field(..., description="Absolute index of the profile just observed")
    log_lr_max: float = Field(..., description="max over tau of the log likelihood ratio")
    signaled: bool
    tau_hat: int | None = Field(None, description="Estimated changepoint when signaled")
    sigma_hat: float | None = Field(None, description="Estimated sigma when signaled")

    @classmethod
    def from_event(cls, event: ChartEvent) -> "ChartEventRecord":
        return cls(
            t=event.t,
            log_lr_max=event.log_lr_max,
            signaled=event.signaled,
            tau_hat=event.tau_hat,
            sigma_hat=event.sigma_hat,
        )


class SignalSummaryRecord(BaseModel):
    """Final line after a signal: the changepoint and post-change sigma estimates."""

    record: Literal["signal"] = "signal"
    t: int
    tau_hat: int
    sigma_hat: float


class StreamHeaderRecord(BaseModel):
    record: Literal["header"] = "header"
    version: int = RECORD_VERSION
    method: str
    n: int
    sigma0: float
    log_ucl: float
    m0: float
    basis: str
    window: int | None = None
    seed: int | None = None


class CalibrationRecord(BaseModel):
    """
    Versioned on-disk form of a calibration result. Identical calibration
    requests write identical bytes; the run id lives in the logs only.
    """

    version: int = RECORD_VERSION
    method: str
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
    window: int | None = Field(None, description="History cap the limit was tuned for")
    package_version: str = ""

    @classmethod
    def from_result(
        cls, result: CalibrationResult, package_version: str = ""
    ) -> "CalibrationRecord":
        return cls(
            method=result.method.value,
            n=result.n,
            sigma0=result.sigma0,
            log_ucl=result.log_ucl,
            achieved_arl=result.achieved_arl,
            arl_std_err=result.arl_std_err,
            m0=result.m0,
            m0_std_err=result.m0_std_err,
            truncated_runs=result.truncated_runs,
            converged=result.converged,
            target_arl=result.target_arl,
            runs=result.runs,
            max_run_length=result.max_run_length,
            seed=result.seed,
            tolerance=result.tolerance,
            validation_arl=result.validation_arl,
            validation_std_err=result.validation_std_err,
            window=result.window,
            package_version=package_version,
        )

    def to_result(self) -> CalibrationResult:
        return CalibrationResult(
            method=EstimationMethod.from_name(self.method),
            n=self.n,
            sigma0=self.sigma0,
            log_ucl=self.log_ucl,
            achieved_arl=self.achieved_arl,
            arl_std_err=self.arl_std_err,
            m0=self.m0,
            m0_std_err=self.m0_std_err,
            truncated_runs=self.truncated_runs,
            converged=self.converged,
            target_arl=self.target_arl,
            runs=self.runs,
            max_run_length=self.max_run_length,
            seed=self.seed,
            tolerance=self.tolerance,
            validation_arl=self.validation_arl,
            validation_std_err=self.validation_std_err,
            window=self.window,
            metadata={"package_version": self.package_version},
        )


class ExperimentMetadata(BaseModel):
    """
    Sidecar written next to every reproduced table, or as a leading comment
    line when the table goes to stdout. Contains nothing that differs
    between two runs with the same inputs and seed.
    """

    version: int = RECORD_VERSION
    table_id: str
    title: str
    runs: int
    seed: int
    n: int
    tau: int
    size_mult: float
    sigma0: float
    basis: str
    methods: list[str]
    log_ucls: dict[str, float]
    m0: dict[str, float]
    window: int | None = None
    package_version: str = ""
