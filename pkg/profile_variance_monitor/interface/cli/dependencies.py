import math
from functools import lru_cache
from pathlib import Path

from profile_variance_monitor.application.services.density_provider import (
    DensityProvider,
)
from profile_variance_monitor.application.services.profile_generator import (
    ProfileGenerator,
)
from profile_variance_monitor.application.use_cases.calibrate_control_limit import (
    CalibrateControlLimitUseCase,
)
from profile_variance_monitor.application.use_cases.run_experiment import (
    RunExperimentUseCase,
)
from profile_variance_monitor.common.config import MonitorSettings
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.input_exceptions import (
    ConfigurationError,
    RecordFormatError,
)
from profile_variance_monitor.domain.models.calibration import (
    CalibrationResult,
    CalibrationSpec,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.infrastructure.adapters.wavelet_transform import (
    PyWaveletsTransform,
)
from profile_variance_monitor.infrastructure.cache import FileDensityStore
from profile_variance_monitor.interface.schemas.records import CalibrationRecord

logger = StructuredLogger(__name__)

_DISABLED = ("", "none", "off")


@lru_cache
def get_transform() -> PyWaveletsTransform:
    return PyWaveletsTransform()


@lru_cache
def get_density_provider(cache_dir: str) -> DensityProvider:
    store = None if cache_dir.strip().lower() in _DISABLED else FileDensityStore(cache_dir)
    return DensityProvider(store=store)


def get_calibration_use_case(settings: MonitorSettings) -> CalibrateControlLimitUseCase:
    return CalibrateControlLimitUseCase(
        densities=get_density_provider(settings.density_cache_dir),
        workers=settings.workers,
    )


def get_experiment_use_case(settings: MonitorSettings) -> RunExperimentUseCase:
    return RunExperimentUseCase(
        generator=ProfileGenerator(get_transform()),
        workers=settings.workers,
        hard_cap=settings.run_hard_cap,
    )


def package_version() -> str:
    from profile_variance_monitor import __version__

    return __version__


def write_calibration(result: CalibrationResult, path: Path | None) -> str:
    record = CalibrationRecord.from_result(result, package_version=package_version())
    text = record.model_dump_json(indent=2)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
    return text


def read_calibration(path: Path) -> CalibrationResult:
    try:
        record = CalibrationRecord.model_validate_json(path.read_text())
    except FileNotFoundError as e:
        raise RecordFormatError(str(path), "file not found") from e
    except ValueError as e:
        raise RecordFormatError(str(path), str(e)) from e
    return record.to_result()


def calibration_path(
    directory: Path,
    method: EstimationMethod,
    n: int,
    sigma0: float,
    target_arl: float,
    window: int | None = None,
) -> Path:
    name = f"calibration_{method.value}_n{n}_sigma{sigma0:g}_arl{target_arl:g}"
    if window is not None:
        name += f"_w{window}"
    return directory / f"{name}.json"


def check_calibration(
    result: CalibrationResult,
    method: EstimationMethod,
    n: int,
    sigma0: float,
    window: int | None = None,
    target_arl: float | None = None,
) -> CalibrationResult:
    """
    Rejects a stored calibration tuned for a different chart. ``target_arl``
    is only compared when the caller asks for a specific one.
    """
    stored = (result.method, result.n, result.window)
    if stored != (method, n, window) or not math.isclose(result.sigma0, sigma0):
        raise ConfigurationError(
            f"calibration for ({result.method.value}, n={result.n}, sigma0={result.sigma0}, "
            f"window={result.window}) cannot be used with "
            f"({method.value}, n={n}, sigma0={sigma0}, window={window})"
        )
    if target_arl is not None and not math.isclose(result.target_arl, target_arl):
        raise ConfigurationError(
            f"calibration targets ARL {result.target_arl:g}, requested {target_arl:g}"
        )
    return result


def stored_or_fresh_calibrations(settings: MonitorSettings, directory: Path, seed: int):
    """
    Calibration provider for table reproduction: reuses calibration files
    in ``directory`` and calibrates (then stores) any that are missing.
    """
    use_case = get_calibration_use_case(settings)

    def provide(method: EstimationMethod, n: int) -> CalibrationResult:
        path = calibration_path(
            directory, method, n, settings.sigma0, settings.target_arl, settings.chart_window
        )
        if path.is_file():
            logger.info("Using stored calibration", method=method.value, n=n, path=str(path))
            return check_calibration(
                read_calibration(path),
                method,
                n,
                settings.sigma0,
                window=settings.chart_window,
                target_arl=settings.target_arl,
            )

        spec = CalibrationSpec(
            method=method,
            n=n,
            sigma0=settings.sigma0,
            target_arl=settings.target_arl,
            runs=settings.calibration_runs,
            seed=seed,
            tolerance=settings.calibration_tolerance,
            m0_draws=settings.m0_draws,
            window=settings.chart_window,
        )
        result = use_case.execute(spec)
        write_calibration(result, path)
        return result

    return provide
