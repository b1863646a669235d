"""
Sampling densities of the per-profile scale statistics at noise level sigma.

Everything is evaluated in log space. Queries that fall outside a density's
support or tabulated range return LOG_DENSITY_FLOOR so that likelihood
ratios stay finite.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betaln, erf, erfc, gammaln, log_ndtr, logsumexp
from scipy.stats import chi2

from profile_variance_monitor.domain.exceptions.estimation_exceptions import (
    DensityNormalizationError,
    InsufficientLengthError,
    InvalidDensityArgumentError,
)
from profile_variance_monitor.domain.models.noise_statistic import EstimationMethod
from profile_variance_monitor.domain.services.scale_estimators import (
    MAD_CONSTANT,
    PSE_SCALE,
    PSE_TRIM_MULTIPLIER,
)

LOG_DENSITY_FLOOR = -745.0
NORMALIZATION_TOLERANCE = 1e-4
PSE_NORMALIZATION_NODES = 4096

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_SQRT2 = np.sqrt(2.0)

# Quadrature over the spacing d between the two middle order statistics
_INITIAL_QUADRATURE_NODES = 257
_MAX_QUADRATURE_NODES = 8193
_QUADRATURE_RTOL = 1e-7
_SPACING_DECAY_WIDTHS = 60.0
_GRID_CHUNK = 512


def _log_phi(x):
    return -0.5 * np.square(x) - _LOG_SQRT_2PI


def _floored(log_values):
    return np.maximum(np.nan_to_num(log_values, nan=LOG_DENSITY_FLOOR), LOG_DENSITY_FLOOR)


# ---------------------------------------------------------------- MAD


def mad_density_grid(nodes: int = 4096) -> np.ndarray:
    """
    Abscissae for f_{M,1}: geometric on [1e-3, 0.2], linear on [0.2, 3.0]
    with ``nodes`` points, geometric on [3.0, 8.0].
    """
    lower = np.geomspace(1e-3, 0.2, 256, endpoint=False)
    middle = np.linspace(0.2, 3.0, nodes, endpoint=False)
    upper = np.geomspace(3.0, 8.0, 256)
    return np.concatenate([lower, middle, upper])


@dataclass(frozen=True)
class MadDensityTable:
    """log f_{M,1}(s) tabulated for m finest-detail coefficients."""

    m: int
    grid: np.ndarray
    log_density: np.ndarray

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        log_density = np.array(self.log_density, dtype=float)
        if grid.ndim != 1 or grid.shape != log_density.shape or grid.size < 2:
            raise InvalidDensityArgumentError(
                "MAD density grid and values must be equal-length vectors"
            )
        if np.any(np.diff(grid) <= 0):
            raise InvalidDensityArgumentError("MAD density grid must be strictly increasing")
        grid.setflags(write=False)
        log_density.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "log_density", log_density)

    def integral(self) -> float:
        return float(np.trapezoid(np.exp(self.log_density), self.grid))

    def log_density_at(self, s, sigma) -> np.ndarray:
        """Vectorized log f_{M,sigma}(s); no argument checks, floored."""
        s = np.asarray(s, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = s / sigma
            values = np.interp(
                scaled,
                self.grid,
                self.log_density,
                left=LOG_DENSITY_FLOOR,
                right=LOG_DENSITY_FLOOR,
            ) - np.log(sigma)
        return _floored(values)


def _simpson_log_weights(nodes: int) -> np.ndarray:
    weights = np.ones(nodes)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return np.log(weights / (3.0 * (nodes - 1)))


def _mad_log_integral(s: np.ndarray, m: int, nodes: int) -> np.ndarray:
    """
    log of the integral over y in (0, cs) of the joint order-statistic kernel,
    without the combinatorial constant, for every s.

    Integrates over the spacing d = z - y in (0, L], where y = cs - d/2 and
    z = cs + d/2; L is the full range 2cs truncated where the kernel has
    decayed by many widths.
    """
    k = m // 2
    cs = MAD_CONSTANT * s
    with np.errstate(divide="ignore"):
        log_g = np.log(erf(cs / _SQRT2))
        log_tail = np.log(2.0) + log_ndtr(-cs)
    g = 2.0 * np.exp(_log_phi(cs))
    cdf = np.exp(log_g)
    tail = np.exp(log_tail)
    with np.errstate(divide="ignore", invalid="ignore"):
        decay = 0.5 * (k - 1) * g * (1.0 / cdf + 1.0 / tail) + cs
    width = np.where(np.isfinite(decay) & (decay > 0), _SPACING_DECAY_WIDTHS / decay, np.inf)
    length = np.minimum(2.0 * cs, width)

    u = np.linspace(0.0, 1.0, nodes)
    d = length[:, None] * u[None, :]
    y = cs[:, None] - 0.5 * d
    z = cs[:, None] + 0.5 * d
    with np.errstate(divide="ignore"):
        log_kernel = (
            _log_phi(y)
            + _log_phi(z)
            + (k - 1) * (np.log(erf(y / _SQRT2)) + np.log(2.0) + log_ndtr(-z))
        )
    # dy = dd / 2 and the d-range is length * du
    log_scale = np.log(0.5 * length)
    return logsumexp(log_kernel + _simpson_log_weights(nodes)[None, :], axis=1) + log_scale


def build_mad_density(m: int, grid: np.ndarray | None = None) -> MadDensityTable:
    """
    Tabulates f_{M,1}, the density of median(|theta|)/c for m half-normal
    coefficients, by integrating the joint density of the (m/2)-th and
    (m/2 + 1)-th order statistics.

    The quadrature is refined (doubling the node count) until two successive
    rules agree to a relative 1e-7 at every abscissa.
    """
    if m < 4 or m % 2:
        raise InsufficientLengthError("MAD density", m, "an even m of at least 4")
    grid = mad_density_grid() if grid is None else np.asarray(grid, dtype=float)

    k = m // 2
    log_constant = (
        np.log(8.0 * MAD_CONSTANT) + gammaln(m + 1) - 2.0 * gammaln(k)
    )

    log_density = np.empty_like(grid)
    for start in range(0, grid.size, _GRID_CHUNK):
        chunk = grid[start : start + _GRID_CHUNK]
        nodes = _INITIAL_QUADRATURE_NODES
        coarse = _mad_log_integral(chunk, m, nodes)
        while True:
            nodes = 2 * nodes - 1
            fine = _mad_log_integral(chunk, m, nodes)
            finite = np.isfinite(fine) & np.isfinite(coarse)
            converged = np.all(np.abs(fine[finite] - coarse[finite]) < _QUADRATURE_RTOL)
            coarse = fine
            if converged or nodes >= _MAX_QUADRATURE_NODES:
                break
        log_density[start : start + chunk.size] = fine + log_constant

    table = MadDensityTable(m=m, grid=grid, log_density=_floored(log_density))
    integral = table.integral()
    if abs(integral - 1.0) > NORMALIZATION_TOLERANCE:
        raise DensityNormalizationError(m, integral, NORMALIZATION_TOLERANCE)
    return table


def mad_log_density(table: MadDensityTable, s: float, sigma: float) -> float:
    """log f_{M,sigma}(s) = log f_{M,1}(s / sigma) - log sigma."""
    if not s > 0:
        raise InvalidDensityArgumentError(f"MAD statistic must be positive, got {s}")
    if not sigma > 0:
        raise InvalidDensityArgumentError(f"sigma must be positive, got {sigma}")
    return float(table.log_density_at(s, sigma))


# ---------------------------------------------------------------- Var


def chisq_log_density(v: float, dof: int) -> float:
    """Exact log chi-square density."""
    if not v > 0:
        raise InvalidDensityArgumentError(f"chi-square argument must be positive, got {v}")
    if dof < 1:
        raise InvalidDensityArgumentError(f"degrees of freedom must be >= 1, got {dof}")
    return float(chi2.logpdf(v, dof))


def _variance_log_density(values, sigma, m: int) -> np.ndarray:
    """log density of s^2 at sigma: (m-1)/sigma^2 * f_chi2((m-1) s^2 / sigma^2)."""
    dof = m - 1
    sigma_sq = np.square(np.asarray(sigma, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.log(dof) - np.log(sigma_sq) + chi2.logpdf(
            dof * np.asarray(values, dtype=float) / sigma_sq, dof
        )
    return _floored(values)


# ---------------------------------------------------------------- PSE


@lru_cache(maxsize=4096)
def pse_log_normalizer(n_kept: int) -> float:
    """
    log c_t for the PSE conditional density.

    With w = [Phi(s/(1.5 sigma)) - 0.5] / [Phi(2.5 s0/sigma) - 0.5] the kernel
    becomes 1.5 w^a (1 - w)^a dw, a = (N - 1)/2, so
    c_t = 1 / (1.5 B(a + 1, a + 1)) depends on N alone.
    """
    a = 0.5 * (n_kept - 1)
    return float(-np.log(PSE_SCALE) - betaln(a + 1.0, a + 1.0))


def _pse_log_kernel(s, sigma, s0, n_kept) -> np.ndarray:
    """
    log of sigma^{-1} phi(z) / D * w^a (1 - w)^a, z = s / (1.5 sigma),
    D = Phi(2.5 s0 / sigma) - 0.5. NaN outside the support (0, 3.75 s0).
    """
    s = np.asarray(s, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    a = 0.5 * (np.asarray(n_kept, dtype=float) - 1.0)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = s / (PSE_SCALE * sigma) / _SQRT2
        b = PSE_TRIM_MULTIPLIER * s0 / sigma / _SQRT2
        erf_b = erf(b)
        log_d = np.log(0.5 * erf_b)
        log_w = np.log(erf(z)) - np.log(erf_b)
        # 1 - w = (erf(b) - erf(z)) / erf(b); use erfc when both are near 1
        gap = np.where(b > 1.0, erfc(z) - erfc(b), erf_b - erf(z))
        log_one_minus_w = np.log(gap) - np.log(erf_b)
        log_kernel = (
            -np.log(sigma)
            + _log_phi(z * _SQRT2)
            - log_d
            + a * (log_w + log_one_minus_w)
        )
        inside = (s > 0) & (z < b) & (sigma > 0) & (s0 > 0)
    return np.where(inside, log_kernel, np.nan)


def _pse_log_density(s, sigma, s0, n_kept) -> np.ndarray:
    n_kept = np.asarray(n_kept)
    a = 0.5 * (n_kept.astype(float) - 1.0)
    log_normalizer = -np.log(PSE_SCALE) - betaln(a + 1.0, a + 1.0)
    return _floored(_pse_log_kernel(s, sigma, s0, n_kept) + log_normalizer)


def pse_log_density(s: float, sigma: float, s0: float, n_kept: int) -> float:
    """
    log f_{P,sigma}(s | s0, N): the odd-N conditional density of the PSE,
    also applied to even N with the actual N plugged in.
    """
    if not (sigma > 0 and s0 > 0):
        raise InvalidDensityArgumentError(
            f"sigma and s0 must be positive, got sigma={sigma}, s0={s0}"
        )
    if n_kept < 1:
        raise InvalidDensityArgumentError(f"kept count must be >= 1, got {n_kept}")
    upper = PSE_SCALE * PSE_TRIM_MULTIPLIER * s0
    if not 0 < s < upper:
        raise InvalidDensityArgumentError(
            f"PSE statistic {s} lies outside the support (0, {upper})"
        )
    kernel = float(_pse_log_kernel(s, sigma, s0, n_kept))
    return max(kernel + pse_log_normalizer(int(n_kept)), LOG_DENSITY_FLOOR)


def normalize_pse_kernel(
    sigma: float, s0: float, n_kept: int, nodes: int = PSE_NORMALIZATION_NODES
) -> float:
    """
    Numeric log c_t: minus the log of the kernel's integral over
    (0, 3.75 s0), by Simpson's rule in log space on ``nodes`` points.
    Agrees with ``pse_log_normalizer`` when the kernel is well resolved.
    """
    if nodes % 2 == 0:
        nodes += 1
    upper = PSE_SCALE * PSE_TRIM_MULTIPLIER * s0
    s = np.linspace(0.0, upper, nodes)
    log_kernel = _pse_log_kernel(s, sigma, s0, n_kept)
    log_kernel = np.where(np.isnan(log_kernel), -np.inf, log_kernel)
    log_weights = _simpson_log_weights(nodes) + np.log(upper)
    return float(-logsumexp(log_kernel + log_weights))


# ---------------------------------------------------------------- chart view


@dataclass(frozen=True)
class NoiseDensity:
    """
    Log density of one method's statistic, vectorized for the chart.

    ``values``, ``sigma``, ``s0`` and ``n_kept`` broadcast against each other.
    """

    method: EstimationMethod
    m: int
    mad_table: MadDensityTable | None = None

    def __post_init__(self):
        if self.method is EstimationMethod.MAD:
            if self.mad_table is None:
                raise InvalidDensityArgumentError("MAD densities need a tabulated f_{M,1}")
            if self.mad_table.m != self.m:
                raise InvalidDensityArgumentError(
                    f"MAD table built for m={self.mad_table.m}, chart uses m={self.m}"
                )

    def log_density(self, values, sigma, s0=None, n_kept=None) -> np.ndarray:
        if self.method is EstimationMethod.VAR:
            return _variance_log_density(values, sigma, self.m)
        if self.method is EstimationMethod.MAD:
            assert self.mad_table is not None
            return self.mad_table.log_density_at(values, sigma)
        return _pse_log_density(values, sigma, s0, n_kept)
