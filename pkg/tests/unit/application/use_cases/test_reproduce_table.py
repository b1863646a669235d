import pytest

from profile_variance_monitor.application.services.density_provider import (
    DensityProvider,
)
from profile_variance_monitor.application.services.profile_generator import (
    ProfileGenerator,
)
from profile_variance_monitor.application.use_cases.reproduce_table import (
    ReproduceTableUseCase,
)
from profile_variance_monitor.application.use_cases.run_experiment import (
    RunExperimentUseCase,
)
from profile_variance_monitor.domain.exceptions.experiment_exceptions import (
    UnknownTableError,
)
from profile_variance_monitor.domain.models.calibration import CalibrationResult
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.infrastructure.adapters.wavelet_transform import (
    PyWaveletsTransform,
)


def fixed_calibration(method: EstimationMethod, n: int) -> CalibrationResult:
    return CalibrationResult(
        method=method,
        n=n,
        sigma0=1.0,
        log_ucl=3.0,
        achieved_arl=200.0,
        arl_std_err=5.0,
        m0=1.0,
        m0_std_err=0.001,
        truncated_runs=0,
        converged=True,
        target_arl=200.0,
        runs=2000,
        max_run_length=2000,
        seed=0,
        tolerance=0.05,
    )


@pytest.fixture
def requested() -> list[tuple[EstimationMethod, int]]:
    return []


@pytest.fixture
def use_case(
    transform: PyWaveletsTransform, requested: list[tuple[EstimationMethod, int]]
) -> ReproduceTableUseCase:
    def calibrations(method: EstimationMethod, n: int) -> CalibrationResult:
        requested.append((method, n))
        return fixed_calibration(method, n)

    return ReproduceTableUseCase(
        experiments=RunExperimentUseCase(ProfileGenerator(transform), hard_cap=200),
        transform=transform,
        densities=DensityProvider(),
        calibrations=calibrations,
    )


def test_should_build_one_row_per_cell_with_reference_column(
    use_case: ReproduceTableUseCase, requested: list[tuple[EstimationMethod, int]]
) -> None:
    result = use_case.execute("T5-partial", runs=2, seed=1)

    frame = result.to_frame()
    assert list(frame["sigma"]) == [1.1, 0.7]
    assert list(frame["NEWMA ARL"]) == [4.14, 1.43]
    assert {"PSE ARL", "Var ARL", "PSE sigma_hat", "Var tau_hat SE"} <= set(frame.columns)
    assert "Var P_hat" not in frame.columns
    assert requested == [(EstimationMethod.PSE, 256), (EstimationMethod.VAR, 256)]


def test_should_keep_one_run_length_row_per_simulated_run(
    use_case: ReproduceTableUseCase,
) -> None:
    result = use_case.execute("t5", runs=2, seed=1)

    lengths = result.run_length_frame()
    assert len(lengths) == 2 * 2 * 2
    assert set(lengths["method"]) == {"PSE", "Var"}
    assert (lengths["run_length"] >= 1).all()


def test_should_reproduce_the_same_table_for_the_same_seed(
    use_case: ReproduceTableUseCase,
) -> None:
    first = use_case.execute("T5-partial", runs=2, seed=4).to_frame()
    second = use_case.execute("T5-partial", runs=2, seed=4).to_frame()

    assert first.equals(second)


def test_should_raise_unknown_table_for_unlisted_id(use_case: ReproduceTableUseCase) -> None:
    with pytest.raises(UnknownTableError):
        use_case.execute("T9", runs=2)
