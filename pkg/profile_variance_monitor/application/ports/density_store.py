from abc import ABC, abstractmethod

import numpy as np

from profile_variance_monitor.domain.services.noise_densities import MadDensityTable


class DensityTableStorePort(ABC):
    @abstractmethod
    def load(self, m: int, grid: np.ndarray) -> MadDensityTable | None:
        """
        Returns the stored MAD density table for ``m`` tabulated on ``grid``,
        or None on a miss.

        Raises:
            NotImplementedError: This method must be implemented by concrete adapters
        """
        raise NotImplementedError

    @abstractmethod
    def save(self, table: MadDensityTable) -> bool:
        """
        Persists ``table``; returns False when the store is unavailable.

        Raises:
            NotImplementedError: This method must be implemented by concrete adapters
        """
        raise NotImplementedError
