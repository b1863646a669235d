"""
Within-profile noise scale estimators applied to the finest-detail wavelet
coefficients: sample variance, median absolute deviation and Lenth's
pseudo-standard error.
"""

import numpy as np
from scipy.stats import norm

from profile_variance_monitor.domain.exceptions.estimation_exceptions import (
    DegenerateScaleError,
    EmptyDetailError,
    InsufficientLengthError,
)
from profile_variance_monitor.domain.models.noise_statistic import (
    EstimationMethod,
    NoiseStatistic,
)

# Phi^{-1}(3/4): makes median(|theta|) / c consistent for sigma under normality
MAD_CONSTANT = float(norm.ppf(0.75))
PSE_SCALE = 1.5
PSE_TRIM_MULTIPLIER = 2.5


def _as_vector(detail) -> np.ndarray:
    return np.asarray(detail, dtype=float).ravel()


def mad_scale(detail) -> NoiseStatistic:
    """
    s_M = median(|theta|) / c, the mean of the (m/2)-th and (m/2 + 1)-th
    order statistics of |theta| divided by c.

    Centred at zero rather than at the sample median: the finest-detail
    coefficients have mean zero under the model.
    """
    values = _as_vector(detail)
    if values.size == 0:
        raise EmptyDetailError("MAD")
    if values.size % 2:
        raise InsufficientLengthError("MAD", values.size, "an even number of values")

    scale = float(np.median(np.abs(values))) / MAD_CONSTANT
    return NoiseStatistic(method=EstimationMethod.MAD, value=scale, m=values.size)


def variance_scale(detail) -> NoiseStatistic:
    """Sample variance with divisor m - 1."""
    values = _as_vector(detail)
    if values.size < 2:
        raise InsufficientLengthError("Var", values.size, "at least 2 values")

    variance = float(np.var(values, ddof=1))
    return NoiseStatistic(method=EstimationMethod.VAR, value=variance, m=values.size)


def pse_scale(detail) -> NoiseStatistic:
    """
    Lenth's pseudo-standard error.

    s0 = 1.5 * median|theta|; coefficients with |theta| < 2.5 * s0 (strict)
    survive, and the statistic is 1.5 times the median of the surviving
    absolute values.
    """
    values = _as_vector(detail)
    if values.size == 0:
        raise EmptyDetailError("PSE")

    magnitudes = np.abs(values)
    s0 = PSE_SCALE * float(np.median(magnitudes))
    if s0 <= 0.0:
        raise DegenerateScaleError(
            "PSE pre-trim scale s0 is zero; the coefficient block is degenerate"
        )

    kept = magnitudes[magnitudes < PSE_TRIM_MULTIPLIER * s0]
    if kept.size == 0:
        raise DegenerateScaleError("PSE trimming removed every coefficient")

    scale = PSE_SCALE * float(np.median(kept))
    return NoiseStatistic(
        method=EstimationMethod.PSE,
        value=scale,
        m=values.size,
        s0=s0,
        n_kept=int(kept.size),
    )


_ESTIMATORS = {
    EstimationMethod.MAD: mad_scale,
    EstimationMethod.VAR: variance_scale,
    EstimationMethod.PSE: pse_scale,
}


def estimate(method: EstimationMethod, detail) -> NoiseStatistic:
    return _ESTIMATORS[method](detail)


def batch_scales(method: EstimationMethod, blocks: np.ndarray) -> np.ndarray:
    """
    Statistic values for every row of a 2-D array of coefficient blocks.

    Matches ``estimate(method, row).value`` row by row; degenerate PSE rows
    yield NaN instead of raising.
    """
    blocks = np.atleast_2d(np.asarray(blocks, dtype=float))
    m = blocks.shape[1]
    if method is EstimationMethod.VAR:
        return np.var(blocks, axis=1, ddof=1)
    if method is EstimationMethod.MAD:
        return np.median(np.abs(blocks), axis=1) / MAD_CONSTANT

    ordered = np.sort(np.abs(blocks), axis=1)
    s0 = PSE_SCALE * np.median(ordered, axis=1)
    n_kept = np.sum(ordered < (PSE_TRIM_MULTIPLIER * s0)[:, None], axis=1)
    lower = np.clip((n_kept - 1) // 2, 0, m - 1)
    upper = np.clip(n_kept // 2, 0, m - 1)
    middle = 0.5 * (
        np.take_along_axis(ordered, lower[:, None], axis=1)[:, 0]
        + np.take_along_axis(ordered, upper[:, None], axis=1)[:, 0]
    )
    return np.where((n_kept > 0) & (s0 > 0), PSE_SCALE * middle, np.nan)
