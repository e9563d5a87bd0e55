"""Entanglement diagnostics evaluated from an output covariance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DivergentVariance, ZeroVariance
from .fluctuations import CovarianceMatrix
from .optimal import bright_dark_covariance, dark_mode_stats, optimized_duan
from .spectra import P_MINUS, P_PLUS, X_MINUS, X_PLUS, joint_spectrum

Quadrature = Literal["amplitude", "phase"]


@dataclass(frozen=True)
class CriteriaReport:
    omega: float
    sx_minus: float
    sp_plus: float
    sx_plus: float
    sp_minus: float
    cx: float
    cp: float
    vx: float
    vp: float
    epr_product: float
    duan: float
    fidelity: float
    theta_opt: float
    duan_opt: float


def _entries(cov: CovarianceMatrix, quadrature: Quadrature):
    k = 0 if quadrature == "amplitude" else 1
    if quadrature not in ("amplitude", "phase"):
        raise ValueError(f"unknown quadrature {quadrature!r}")
    m = cov.m
    v1, v2, c12 = m[k, k], m[2 + k, 2 + k], m[k, 2 + k]
    if not np.isfinite([v1, v2, c12]).all():
        raise DivergentVariance(f"{quadrature} variance diverges at Omega={cov.omega}")
    return v1, v2, c12


def normalized_correlation(cov: CovarianceMatrix, quadrature: Quadrature) -> float:
    v1, v2, c12 = _entries(cov, quadrature)
    if v1 <= 0 or v2 <= 0:
        raise ZeroVariance(f"{quadrature} variance vanishes")
    return float(c12 / np.sqrt(v1 * v2))


def conditional_variance(cov: CovarianceMatrix, quadrature: Quadrature) -> float:
    """Inference error ``min_g Var(q1 - g q2)`` of beam 1 from beam 2."""
    v1, v2, c12 = _entries(cov, quadrature)
    if v2 <= 0:
        raise ZeroVariance(f"{quadrature} variance of the inferring beam vanishes")
    k = 0 if quadrature == "amplitude" else 1
    # equals v1 - c12^2 / v2, evaluated without cancelling large variances
    c = np.zeros(4)
    c[k], c[2 + k] = 1.0, -c12 / v2
    return cov.variance(c)


def _flagged(func, cov, quadrature):
    try:
        return func(cov, quadrature)
    except DivergentVariance:
        return np.inf


def epr_product(cov: CovarianceMatrix) -> float:
    """``V_x V_p``; below 1 demonstrates EPR correlations. inf if either diverges."""
    vx = _flagged(conditional_variance, cov, "amplitude")
    vp = _flagged(conditional_variance, cov, "phase")
    return vx * vp


def duan_sum(cov: CovarianceMatrix) -> float:
    return joint_spectrum(cov, X_MINUS) + joint_spectrum(cov, P_PLUS)


def fidelity_from_spectra(sx_minus, sp_plus):
    return 1.0 / np.sqrt((1.0 + sx_minus) * (1.0 + sp_plus))


def fidelity(cov: CovarianceMatrix) -> float:
    """Unity-gain teleportation fidelity; 0 when a needed spectrum diverges."""
    return float(fidelity_from_spectra(joint_spectrum(cov, X_MINUS), joint_spectrum(cov, P_PLUS)))


def report(cov: CovarianceMatrix) -> CriteriaReport:
    sx_minus = joint_spectrum(cov, X_MINUS)
    sp_plus = joint_spectrum(cov, P_PLUS)
    vx = _flagged(conditional_variance, cov, "amplitude")
    vp = _flagged(conditional_variance, cov, "phase")
    try:
        cx = normalized_correlation(cov, "amplitude")
    except DivergentVariance:
        cx = np.nan
    try:
        cp = normalized_correlation(cov, "phase")
    except DivergentVariance:
        cp = np.nan
    try:
        theta = dark_mode_stats(bright_dark_covariance(cov)).theta_opt
    except DivergentVariance:
        theta = np.nan
    return CriteriaReport(
        omega=cov.omega,
        sx_minus=sx_minus,
        sp_plus=sp_plus,
        sx_plus=joint_spectrum(cov, X_PLUS),
        sp_minus=joint_spectrum(cov, P_MINUS),
        cx=cx,
        cp=cp,
        vx=vx,
        vp=vp,
        epr_product=vx * vp,
        duan=sx_minus + sp_plus,
        fidelity=float(fidelity_from_spectra(sx_minus, sp_plus)),
        theta_opt=theta,
        duan_opt=optimized_duan(cov),
    )
