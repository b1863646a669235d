import numpy as np
import pytest

from profile_variance_monitor.application.services.statistic_pipeline import (
    StatisticPipeline,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.models.profile import Profile, WaveletBasisSpec
from profile_variance_monitor.domain.services.scale_estimators import estimate
from profile_variance_monitor.infrastructure.adapters.wavelet_transform import (
    PyWaveletsTransform,
)


@pytest.mark.parametrize("method", list(EstimationMethod))
def test_should_estimate_scale_from_finest_detail_block(
    transform: PyWaveletsTransform, rng: np.random.Generator, method: EstimationMethod
) -> None:
    profile = Profile(rng.normal(size=64))
    pipeline = StatisticPipeline(transform, method, WaveletBasisSpec("db4"), j0=0)

    stat = pipeline.statistic(profile)

    detail = transform.dwt(profile, WaveletBasisSpec("db4"), 0).finest_detail()
    assert stat.method is method
    assert stat.m == 32
    assert stat.value == pytest.approx(estimate(method, detail).value)


def test_should_ignore_smooth_signal_in_finest_detail_with_haar(
    transform: PyWaveletsTransform,
) -> None:
    pipeline = StatisticPipeline(transform, EstimationMethod.VAR, WaveletBasisSpec("haar"))

    stat = pipeline.statistic(Profile(np.repeat(np.arange(8.0), 2)))

    assert stat.value == pytest.approx(0.0, abs=1e-24)


def test_should_replace_degenerate_pse_statistic_with_zero(
    transform: PyWaveletsTransform,
) -> None:
    pipeline = StatisticPipeline(transform, EstimationMethod.PSE, WaveletBasisSpec("haar"))

    stat = pipeline.statistic(Profile(np.full(16, 3.0), index=5))

    assert stat.value == 0.0
    assert stat.s0 == 0.0
    assert stat.n_kept == 8
