import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from profile_variance_monitor.domain.exceptions.input_exceptions import (
    ConfigurationError,
)


@dataclass(frozen=True)
class MonitorSettings:
    basis: str
    j0: int
    sigma0: float
    target_arl: float
    calibration_runs: int
    calibration_tolerance: float
    m0_draws: int
    density_cache_dir: str
    workers: int
    run_hard_cap: int
    chart_window: int | None
    log_level: str

    def merged(self, overrides: dict[str, Any]) -> "MonitorSettings":
        """Returns a copy with every non-None override applied."""
        known = {f.name: f.type for f in fields(self)}
        updates = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigurationError(f"Unknown configuration key: {key}")
            updates[key] = _coerce(key, value, getattr(self, key))
        return replace(self, **updates)


def load_config() -> MonitorSettings:
    return MonitorSettings(
        basis=os.environ.get("WAVELET_BASIS", "db4"),
        j0=int(os.environ.get("WAVELET_J0", "0")),
        sigma0=float(os.environ.get("SIGMA0", "1.0")),
        target_arl=float(os.environ.get("TARGET_ARL", "200")),
        calibration_runs=int(os.environ.get("CALIBRATION_RUNS", "2000")),
        calibration_tolerance=float(os.environ.get("CALIBRATION_TOLERANCE", "0.05")),
        m0_draws=int(os.environ.get("M0_DRAWS", "1000000")),
        density_cache_dir=os.environ.get("DENSITY_CACHE_DIR", ".density_cache"),
        workers=int(os.environ.get("WORKERS", "1")),
        run_hard_cap=int(os.environ.get("RUN_HARD_CAP", "10000")),
        chart_window=_optional_int(os.environ.get("CHART_WINDOW")),
        log_level=os.environ.get("LOG_LEVEL", "INFO"),
    )


def load_config_file(path: str | Path) -> dict[str, str]:
    """
    Reads a flat configuration file of ``key = value`` lines.

    Blank lines and lines starting with ``#`` are ignored. Keys are
    normalized to snake_case so ``sigma0 = 1.0`` and ``SIGMA0 = 1.0``
    are equivalent.
    """
    entries: dict[str, str] = {}
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigurationError(f"Configuration file not found: {config_path}")

    for line_number, raw in enumerate(config_path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"{config_path}:{line_number}: expected 'key = value', got {raw!r}"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key.lower().replace("-", "_")] = value
    return entries


def _optional_int(value: str | None) -> int | None:
    if value is None or value.strip().lower() in ("", "none"):
        return None
    return int(value)


def _coerce(key: str, value: Any, current: Any) -> Any:
    if not isinstance(value, str):
        return value
    try:
        if key == "chart_window":
            return _optional_int(value)
        if isinstance(current, bool):
            return value.lower() in ("1", "true", "yes")
        if isinstance(current, int):
            return int(value)
        if isinstance(current, float):
            return float(value)
    except ValueError as e:
        raise ConfigurationError(f"Invalid value for {key}: {value!r}") from e
    return value
