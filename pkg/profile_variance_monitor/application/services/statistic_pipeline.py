from dataclasses import dataclass

from profile_variance_monitor.application.ports.wavelet_transform import (
    WaveletTransformPort,
)
from profile_variance_monitor.common.logging import StructuredLogger
from profile_variance_monitor.domain.exceptions.estimation_exceptions import (
    DegenerateScaleError,
)
from profile_variance_monitor.domain.models.noise_statistic import (
    EstimationMethod,
    NoiseStatistic,
)
from profile_variance_monitor.domain.models.profile import Profile, WaveletBasisSpec
from profile_variance_monitor.domain.services.scale_estimators import estimate

logger = StructuredLogger(__name__)


@dataclass(frozen=True)
class StatisticPipeline:
    """profile -> DWT -> finest detail -> per-profile scale statistic."""

    transform: WaveletTransformPort
    method: EstimationMethod
    basis: WaveletBasisSpec = WaveletBasisSpec()
    j0: int = 0

    def statistic(self, profile: Profile) -> NoiseStatistic:
        detail = self.transform.dwt(profile, self.basis, self.j0).finest_detail()
        try:
            return estimate(self.method, detail)
        except DegenerateScaleError as e:
            # A zero PSE evaluates at the density floor instead of stopping the chart
            logger.warning(
                "Degenerate PSE statistic replaced by zero",
                profile_index=profile.index,
                error=e.message,
            )
            return NoiseStatistic(
                method=self.method, value=0.0, m=detail.size, s0=0.0, n_kept=detail.size
            )
