import numpy as np
import pytest

from profile_variance_monitor.application.services.density_provider import (
    DensityProvider,
)
from profile_variance_monitor.infrastructure.adapters.wavelet_transform import (
    PyWaveletsTransform,
)


@pytest.fixture(scope="session")
def transform() -> PyWaveletsTransform:
    return PyWaveletsTransform()


@pytest.fixture(scope="session")
def density_provider() -> DensityProvider:
    """Shared across the session so each MAD table is integrated once."""
    return DensityProvider()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
