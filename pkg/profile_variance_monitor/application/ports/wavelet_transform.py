from abc import ABC, abstractmethod

from profile_variance_monitor.domain.models.profile import (
    Profile,
    WaveletBasisSpec,
    WaveletDecomposition,
)


class WaveletTransformPort(ABC):
    @abstractmethod
    def dwt(self, profile: Profile, basis: WaveletBasisSpec, j0: int) -> WaveletDecomposition:
        """
        Orthonormal periodized DWT of ``profile`` down to the coarsest level j0.

        Raises:
            NotImplementedError: This method must be implemented by concrete adapters
        """
        raise NotImplementedError

    @abstractmethod
    def idwt(self, decomposition: WaveletDecomposition, basis: WaveletBasisSpec) -> Profile:
        """
        Inverse of ``dwt``.

        Raises:
            NotImplementedError: This method must be implemented by concrete adapters
        """
        raise NotImplementedError
