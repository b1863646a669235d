from collections.abc import Callable
from dataclasses import dataclass, field

import pandas as pd

from profile_variance_monitor.application.ports.wavelet_transform import (
    WaveletTransformPort,
)
from profile_variance_monitor.application.services.density_provider import (
    DensityProvider,
)
from profile_variance_monitor.application.services.statistic_pipeline import (
    StatisticPipeline,
)
from profile_variance_monitor.application.use_cases.run_experiment import (
    ExperimentDesign,
    RunExperimentUseCase,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.models.calibration import CalibrationResult
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.models.profile import WaveletBasisSpec
from profile_variance_monitor.domain.models.simulation import (
    ExperimentSummary,
    ProfileGenSpec,
    RunRecord,
    TableLayout,
    table_layout,
)
from profile_variance_monitor.domain.services.changepoint_chart import ChangepointChart

logger = StructuredLogger(__name__)

CalibrationProvider = Callable[[EstimationMethod, int], CalibrationResult]


def _column_group(summary: ExperimentSummary, false_alarms: bool) -> dict[str, float]:
    label = summary.method.to_display_string()
    columns = {
        f"{label} ARL": summary.arl,
        f"{label} ARL SE": summary.arl_se,
        f"{label} tau_hat": summary.tau_hat,
        f"{label} tau_hat SE": summary.tau_hat_se,
        f"{label} sigma_hat": summary.sigma_hat,
        f"{label} sigma_hat SE": summary.sigma_hat_se,
    }
    if false_alarms:
        columns[f"{label} P_hat"] = summary.false_alarm_rate
        columns[f"{label} N_bar"] = summary.false_alarm_mean
    return columns


@dataclass
class TableResult:
    layout: TableLayout
    runs: int
    seed: int
    summaries: list[ExperimentSummary] = field(default_factory=list)
    records: dict[tuple[float, float, EstimationMethod], list[RunRecord]] = field(
        default_factory=dict
    )
    calibrations: dict[EstimationMethod, CalibrationResult] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        """One row per (p, sigma) cell, one column group per method."""
        rows = []
        for p, sigma in self.layout.cells:
            row: dict[str, float] = {"p": p, "sigma": sigma}
            if self.layout.reference:
                row["NEWMA ARL"] = self.layout.reference.get(sigma, float("nan"))
            for summary in self.summaries:
                if summary.p == p and summary.sigma == sigma:
                    row.update(_column_group(summary, self.layout.false_alarm_columns))
            rows.append(row)
        return pd.DataFrame(rows)

    def run_length_frame(self) -> pd.DataFrame:
        """Long format: one row per simulated run, for external plotting."""
        rows = [
            {
                "p": p,
                "sigma": sigma,
                "method": method.to_display_string(),
                "run": run,
                "run_length": record.run_length,
                "tau_hat": record.tau_hat,
                "local_tau_hat": record.local_tau_hat,
                "sigma_hat": record.sigma_hat,
                "false_alarms": record.false_alarms,
                "truncated": record.truncated,
            }
            for (p, sigma, method), records in self.records.items()
            for run, record in enumerate(records)
        ]
        return pd.DataFrame(rows)


@dataclass
class ReproduceTableUseCase:
    """
    Runs every (p, sigma, method) cell of a published table layout.

    Charts use the calibrated UCL and m0 for (method, n); in-control
    profiles are generated at sigma0 and out-of-control ones at the row's
    sigma, both with the row's structure proportion.
    """

    experiments: RunExperimentUseCase
    transform: WaveletTransformPort
    densities: DensityProvider
    calibrations: CalibrationProvider
    basis: WaveletBasisSpec = WaveletBasisSpec()
    j0: int = 0
    sigma0: float = 1.0
    window: int | None = None

    def execute(self, table_id: str, runs: int | None = None, seed: int = 0) -> TableResult:
        layout = table_layout(table_id)
        runs = runs or layout.default_runs
        result = TableResult(layout=layout, runs=runs, seed=seed)

        for method in layout.methods:
            calibration = self.calibrations(method, layout.n)
            result.calibrations[method] = calibration
            chart = ChangepointChart(
                density=self.densities.density(method, layout.n // 2),
                sigma0=self.sigma0,
                log_ucl=calibration.log_ucl,
                m0=calibration.m0,
                window=self.window,
            )
            pipeline = StatisticPipeline(self.transform, method, self.basis, self.j0)

            for cell_index, (p, sigma) in enumerate(layout.cells):
                gen0 = ProfileGenSpec(
                    n=layout.n,
                    p=p,
                    size_mult=layout.size_mult,
                    sigma=self.sigma0,
                    basis=self.basis.name,
                    j0=self.j0,
                )
                design = ExperimentDesign(
                    gen0=gen0, gen1=gen0.with_sigma(sigma), tau_true=layout.tau
                )
                records, summary = self.experiments.execute(
                    design, chart, pipeline, runs, seed, stream_keys=(cell_index,)
                )
                result.records[(p, sigma, method)] = records
                result.summaries.append(summary)

        logger.info("Table reproduced", table_id=layout.table_id, runs=runs, seed=seed)
        return result
