import warnings
from functools import lru_cache

import numpy as np
import pywt

from profile_variance_monitor.application.ports.wavelet_transform import (
    WaveletTransformPort,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.wavelet_exceptions import (
    InvalidLevelError,
    UnknownBasisError,
)
from profile_variance_monitor.domain.models.profile import (
    Profile,
    WaveletBasisSpec,
    WaveletDecomposition,
)

logger = StructuredLogger(__name__)

_MODE = "periodization"


@lru_cache(maxsize=64)
def resolve_wavelet(name: str) -> pywt.Wavelet:
    """
    Looks up an orthogonal discrete wavelet by PyWavelets name.

    Continuous and biorthogonal (non-orthogonal) families are rejected: the
    noise passes through the transform unchanged only for orthonormal filters.
    """
    if name not in pywt.wavelist(kind="discrete"):
        raise UnknownBasisError(name, "not a discrete PyWavelets family member")
    wavelet = pywt.Wavelet(name)
    if not wavelet.orthogonal:
        raise UnknownBasisError(name, "the family is not orthogonal")
    logger.debug("wavelet_resolved", basis=name, filter_length=wavelet.dec_len)
    return wavelet


class PyWaveletsTransform(WaveletTransformPort):
    """Periodized orthonormal DWT backed by ``pywt.wavedec``/``pywt.waverec``."""

    def dwt(
        self, profile: Profile, basis: WaveletBasisSpec, j0: int = 0
    ) -> WaveletDecomposition:
        wavelet = resolve_wavelet(basis.name)
        levels = profile.levels
        if not 0 <= j0 <= levels - 1:
            raise InvalidLevelError(j0, levels - 1)

        with warnings.catch_warnings():
            # pywt warns about boundary effects once filters exceed the signal
            # length; periodization stays orthonormal at every level.
            warnings.simplefilter("ignore", UserWarning)
            # model arrays are read-only; pywt needs writable buffers
            values = np.array(profile.values, copy=True)
            blocks = pywt.wavedec(values, wavelet, mode=_MODE, level=levels - j0)
        return WaveletDecomposition(np.concatenate(blocks), j0=j0, basis=basis.name)

    def idwt(
        self, decomposition: WaveletDecomposition, basis: WaveletBasisSpec | None = None
    ) -> Profile:
        wavelet = resolve_wavelet(basis.name if basis else decomposition.basis)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            blocks = [np.array(block, copy=True) for block in decomposition.blocks()]
            values = pywt.waverec(blocks, wavelet, mode=_MODE)
        return Profile(values)
