import hashlib
from pathlib import Path

import numpy as np

from profile_variance_monitor.application.ports.density_store import (
    DensityTableStorePort,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.services.noise_densities import MadDensityTable

logger = StructuredLogger(__name__)

FORMAT_VERSION = 1
_MAGIC = "profile-variance-monitor mad-density"


class FileDensityStore(DensityTableStorePort):
    """
    MAD density tables persisted as versioned text files, one per (m, grid).

    Layout: a header line ``# <magic> v<version> m=<m> nodes=<count>``
    followed by one ``s log_density`` pair per line. Read and write
    failures are logged and treated as misses.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def _generate_cache_key(self, m: int, grid: np.ndarray) -> str:
        grid_hash = hashlib.md5(np.ascontiguousarray(grid, dtype=float).tobytes()).hexdigest()
        return f"mad_m{m}_{grid_hash[:16]}_v{FORMAT_VERSION}"

    def path_for(self, m: int, grid: np.ndarray) -> Path:
        return self.directory / f"{self._generate_cache_key(m, grid)}.txt"

    def load(self, m: int, grid: np.ndarray) -> MadDensityTable | None:
        path = self.path_for(m, grid)
        if not path.is_file():
            logger.debug("Density cache miss", m=m, path=str(path))
            return None

        try:
            with path.open() as handle:
                header = handle.readline().split()
                fields = dict(item.split("=", 1) for item in header if "=" in item)
                if (
                    " ".join(header[1:3]) != _MAGIC
                    or header[3] != f"v{FORMAT_VERSION}"
                    or int(fields["m"]) != m
                ):
                    logger.warning("Density cache header mismatch", path=str(path))
                    return None
                data = np.loadtxt(handle, ndmin=2)
            if data.shape != (int(fields["nodes"]), 2):
                logger.warning("Density cache truncated", path=str(path))
                return None
            table = MadDensityTable(m=m, grid=data[:, 0], log_density=data[:, 1])
            logger.debug("Density cache hit", m=m, path=str(path))
            return table

        except Exception as e:
            logger.warning("Density cache load failed", error=str(e), path=str(path))
            return None

    def save(self, table: MadDensityTable) -> bool:
        path = self.path_for(table.m, table.grid)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            header = f"{_MAGIC} v{FORMAT_VERSION} m={table.m} nodes={table.grid.size}"
            # repr precision keeps the reloaded table bit-identical
            np.savetxt(
                path,
                np.column_stack([table.grid, table.log_density]),
                fmt="%.17g",
                header=header,
            )
            logger.info("Density table stored", m=table.m, path=str(path))
            return True

        except Exception as e:
            logger.warning("Density cache save failed", error=str(e), path=str(path))
            return False
