"""Bright/dark polarization modes and optimized quadratures.

In the steady-state quadrature frame the bright and dark modes are the
balanced combinations ``(a1 +/- a2) / sqrt 2``. The waveplate tilts the dark
mode's noise ellipse; rotating its quadratures by ``theta_opt`` realigns
it with the measurement axes and tightens the inseparability sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergentVariance, ZeroVariance
from .fluctuations import CovarianceMatrix, rotate_quadratures

_BEAMSPLITTER = np.array(
    [[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1]], dtype=float
) / np.sqrt(2)

_X, _P = np.array([1.0, 0.0]), np.array([0.0, 1.0])


@dataclass(frozen=True)
class DarkModeStats:
    s_x: float
    s_p: float
    c_minus: float
    theta_opt: float


def bright_dark_covariance(cov: CovarianceMatrix) -> CovarianceMatrix:
    """Covariance in the ``(x_bright, p_bright, x_dark, p_dark)`` basis.

    The map is its own inverse, so applying it to a bright/dark covariance
    returns the signal/idler one.
    """
    return cov.transform(_BEAMSPLITTER)


def _block(vec2, block):
    c = np.zeros(4)
    c[2 * block : 2 * block + 2] = vec2
    return c


def _ellipse(cov, block):
    x, p = _block(_X, block), _block(_P, block)
    return cov.variance(x), cov.variance(p), cov.covariance(x, p)


def dark_mode_stats(cov_bd: CovarianceMatrix) -> DarkModeStats:
    s_x, s_p, cross = _ellipse(cov_bd, 1)
    if not np.isfinite(s_x * s_p) or not np.isfinite(cross):
        raise DivergentVariance("dark-mode variance diverges at this frequency")
    if s_x * s_p <= 0:
        raise ZeroVariance("dark-mode variance vanishes")
    c_minus = cross / np.sqrt(s_x * s_p)
    # minimizes Var(cos t x - sin t p); t in (-pi/2, pi/2]
    theta = 0.5 * np.arctan2(2 * cross, s_p - s_x)
    if theta <= -np.pi / 2:
        theta += np.pi
    return DarkModeStats(float(s_x), float(s_p), float(c_minus), float(theta))


def _bright_angle(cov_bd: CovarianceMatrix) -> float:
    """Rotation minimizing the bright mode's rotated phase variance."""
    s_x, s_p, cross = _ellipse(cov_bd, 0)
    if not np.isfinite(s_p):
        return np.nan if not np.isfinite(s_x) else np.pi / 2
    if not (np.isfinite(s_x) and np.isfinite(cross)):
        return 0.0
    # Var(sin t x + cos t p) is smallest here
    return 0.5 * float(np.arctan2(-2 * cross, s_x - s_p))


def _dark_angle(cov_bd: CovarianceMatrix) -> float:
    try:
        return dark_mode_stats(cov_bd).theta_opt
    except DivergentVariance:
        s_x, s_p, _ = _ellipse(cov_bd, 1)
        if np.isfinite(s_x):
            return 0.0
        return np.pi / 2 if np.isfinite(s_p) else np.nan


def optimized_pair(cov: CovarianceMatrix, stats: DarkModeStats | None = None) -> CovarianceMatrix:
    """Covariance of the re-phased pair ``(x'1, p'1, x'2, p'2)``.

    The dark mode is rotated by ``stats.theta_opt``; the bright mode by its
    own best angle, which is 0 whenever its ellipse is already upright.
    """
    bd = bright_dark_covariance(cov)
    dark = stats.theta_opt if stats is not None else _dark_angle(bd)
    bright = _bright_angle(bd)
    if np.isnan(dark) or np.isnan(bright):
        raise DivergentVariance("both quadratures of a polarization mode diverge")
    return bright_dark_covariance(rotate_quadratures(bd, bright, dark))


def optimized_duan(cov: CovarianceMatrix) -> float:
    """``S_x(dark') + S_p(bright')`` after aligning the noise ellipses."""
    try:
        primed = bright_dark_covariance(optimized_pair(cov))
    except DivergentVariance:
        return np.inf
    return primed.variance(_block(_X, 1)) + primed.variance(_block(_P, 0))
