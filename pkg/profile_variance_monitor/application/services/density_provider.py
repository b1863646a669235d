from dataclasses import dataclass, field

from profile_variance_monitor.application.ports.density_store import (
    DensityTableStorePort,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.services.noise_densities import (
    MadDensityTable,
    NoiseDensity,
    build_mad_density,
    mad_density_grid,
)

logger = StructuredLogger(__name__)


@dataclass
class DensityProvider:
    """
    Hands out chart densities, building each MAD table once per m and
    persisting it through the optional store.
    """

    store: DensityTableStorePort | None = None
    _tables: dict[int, MadDensityTable] = field(init=False, default_factory=dict)

    def mad_table(self, m: int) -> MadDensityTable:
        if m in self._tables:
            return self._tables[m]

        grid = mad_density_grid()
        table = self.store.load(m, grid) if self.store else None
        if table is None:
            logger.info("Building MAD density table", m=m, nodes=grid.size)
            table = build_mad_density(m, grid)
            if self.store:
                self.store.save(table)
        self._tables[m] = table
        return table

    def density(self, method: EstimationMethod, m: int) -> NoiseDensity:
        if method is EstimationMethod.MAD:
            return NoiseDensity(method=method, m=m, mad_table=self.mad_table(m))
        return NoiseDensity(method=method, m=m)
