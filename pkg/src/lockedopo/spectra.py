"""Joint sum/difference quadrature spectra and their closed forms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import optimize

from .fluctuations import CovarianceMatrix
from .model import OperatingPoint


@dataclass(frozen=True)
class JointSpectrumSelector:
    quadrature: Literal["amplitude", "phase"]
    sign: Literal["sum", "difference"]

    def __post_init__(self):
        if self.quadrature not in ("amplitude", "phase"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")
        if self.sign not in ("sum", "difference"):
            raise ValueError(f"unknown sign {self.sign!r}")

    @property
    def vector(self) -> np.ndarray:
        offset = 0 if self.quadrature == "amplitude" else 1
        c = np.zeros(4)
        c[offset] = 1.0
        c[2 + offset] = 1.0 if self.sign == "sum" else -1.0
        return c


X_PLUS = JointSpectrumSelector("amplitude", "sum")
X_MINUS = JointSpectrumSelector("amplitude", "difference")
P_PLUS = JointSpectrumSelector("phase", "sum")
P_MINUS = JointSpectrumSelector("phase", "difference")


def joint_spectrum(cov: CovarianceMatrix, sel: JointSpectrumSelector) -> float:
    """``Var(q1 +/- q2) / 2``; independent vacua give 1, divergent entries give inf."""
    return 0.5 * cov.variance(sel.vector)


def _ratio(point):
    return 4 * point.rho**2 / point.mu_prime**2


def sx_minus_closed(point: OperatingPoint, omega):
    """Amplitude-difference spectrum at the minimum-threshold point (sigma independent)."""
    om2 = np.asarray(omega, dtype=float) ** 2
    a = _ratio(point)
    mup = point.mu_prime
    num = (om2 - a) ** 2 + a * point.kappa / mup + point.mu / mup * om2
    den = (om2 - a) ** 2 + om2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    # 0/0 at Omega = rho = 0: limit along Omega -> 0 is mu / mu'
    out = np.where(den == 0, point.mu / mup, out)
    return float(out) if out.ndim == 0 else out


def sp_plus_closed(point: OperatingPoint, omega):
    """Phase-sum spectrum at the minimum-threshold point (rho independent)."""
    om2 = np.asarray(omega, dtype=float) ** 2
    out = 1 - (point.kappa / point.mu_prime) / (om2 + point.sigma**2)
    return float(out) if np.ndim(out) == 0 else out


def min_sx_minus(point: OperatingPoint, omega_max: float | None = None) -> tuple[float, float]:
    """Global minimum ``(Omega_min, value)`` of the closed-form amplitude-difference spectrum."""
    if omega_max is None:
        omega_max = 10 * max(1.0, 2 * point.rho / point.mu_prime)
    grid = np.linspace(0.0, omega_max, 2000)
    values = sx_minus_closed(point, grid)
    i = int(np.argmin(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    best = (float(grid[i]), float(values[i]))
    res = optimize.minimize_scalar(
        lambda om: sx_minus_closed(point, om), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-10, "maxiter": 500},
    )
    if res.success and res.fun < best[1]:
        best = (float(res.x), float(res.fun))
    return best


def heisenberg_products(cov: CovarianceMatrix) -> tuple[float, float]:
    """``(S_x^- S_p^-, S_x^+ S_p^+)``; each must be at least 1."""
    return (
        joint_spectrum(cov, X_MINUS) * joint_spectrum(cov, P_MINUS),
        joint_spectrum(cov, X_PLUS) * joint_spectrum(cov, P_PLUS),
    )


__all__ = [
    "JointSpectrumSelector",
    "X_PLUS",
    "X_MINUS",
    "P_PLUS",
    "P_MINUS",
    "joint_spectrum",
    "sx_minus_closed",
    "sp_plus_closed",
    "min_sx_minus",
    "heisenberg_products",
]
