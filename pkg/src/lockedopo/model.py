"""Crystal and cavity parameters, operating points and the classical steady state.

Fields are in the usual normalized OPO units: time in round trips, field
amplitudes such that ``g * A0`` is a round-trip gain. The pump parameter
``sigma`` is the input pump *amplitude* normalized to the threshold
amplitude of the standard OPO, ``sigma = g |A0_in| / mu'``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants, optimize

from .errors import BelowThreshold, FrequencyMismatch, NoConvergence, ParameterOutOfRange

KAPPA_MAX = 0.2
MU_MAX = 0.2
RHO_WARN = 0.2


@dataclass(frozen=True)
class PhysicalCrystal:
    n1: float
    n2: float
    l: float
    chi2: float
    omega0: float
    n0: float = 1.0
    c: float = field(default=constants.c, init=False)
    hbar: float = field(default=constants.hbar, init=False)
    epsilon0: float = field(default=constants.epsilon_0, init=False)

    def __post_init__(self):
        if min(self.n0, self.n1, self.n2) < 1:
            raise ParameterOutOfRange("refractive indices must be >= 1")
        if self.l <= 0 or self.omega0 <= 0:
            raise ParameterOutOfRange("crystal length and pump frequency must be positive")

    @property
    def n_mean(self) -> float:
        return 0.5 * (self.n1 + self.n2)


@dataclass(frozen=True)
class CavityGeometry:
    L: float
    zeta1: float
    zeta2: float
    n_plate: float
    e_plate: float
    psi: float
    rho: float
    kappa: float
    mu: float
    tau: float

    def __post_init__(self):
        _check_losses(self.kappa, self.mu)
        if self.tau <= 0:
            raise ParameterOutOfRange(f"round-trip time must be positive, got {self.tau}")
        if abs(self.rho) > RHO_WARN:
            warnings.warn(f"waveplate angle rho={self.rho} is not small; the model assumes rho << 1")

    @property
    def zeta_mean(self) -> float:
        return 0.5 * (self.zeta1 + self.zeta2)


@dataclass(frozen=True)
class OperatingPoint:
    """One normalized simulation point.

    ``delta1``/``delta2`` are round-trip detunings and ``beta`` is the
    crystal-minus-plate birefringence ``theta - psi``. ``branch`` selects
    the sign of the minimum-threshold detuning ``Delta = branch * 2 rho``.
    """

    kappa: float
    mu: float
    rho: float
    sigma: float
    delta1: float
    delta2: float
    beta: float
    branch: int = 1

    @property
    def mu_prime(self) -> float:
        return self.kappa + self.mu

    @property
    def is_min_threshold(self) -> bool:
        target = self.branch * 2.0 * self.rho
        return (
            math.isclose(self.beta, math.pi / 2, rel_tol=0, abs_tol=1e-12)
            and math.isclose(self.delta1, target, rel_tol=0, abs_tol=1e-12)
            and math.isclose(self.delta2, target, rel_tol=0, abs_tol=1e-12)
        )


@dataclass(frozen=True)
class SteadyState:
    r: float
    phi1: float
    phi2: float
    a0: complex
    g: float

    @property
    def a1(self) -> complex:
        return self.r * np.exp(1j * self.phi1)

    @property
    def a2(self) -> complex:
        return self.r * np.exp(1j * self.phi2)


def _check_losses(kappa, mu):
    if not 0 < kappa <= KAPPA_MAX:
        raise ParameterOutOfRange(f"kappa must lie in (0, {KAPPA_MAX}], got {kappa}")
    if not 0 <= mu <= MU_MAX:
        raise ParameterOutOfRange(f"mu must lie in [0, {MU_MAX}], got {mu}")


def crystal_birefringence(crystal: PhysicalCrystal) -> float:
    """Single-pass birefringent phase ``(omega0 / 2c) (n2 - n1) l`` in radians."""
    return crystal.omega0 / (2 * crystal.c) * (crystal.n2 - crystal.n1) * crystal.l


def coupling_constant(crystal: PhysicalCrystal, omega1: float, omega2: float) -> float:
    if not math.isclose(omega1 + omega2, crystal.omega0, rel_tol=1e-9):
        raise FrequencyMismatch(
            f"omega1 + omega2 = {omega1 + omega2!r} differs from omega0 = {crystal.omega0!r}"
        )
    cr = crystal
    return cr.l * cr.chi2 * math.sqrt(
        cr.hbar * cr.omega0 * omega1 * omega2 / (2 * cr.c**3 * cr.epsilon0 * cr.n0 * cr.n1 * cr.n2)
    )


def _fold(phase: float) -> tuple[int, float]:
    """Split ``phase`` into ``2 pi p + residual`` with residual in (-pi, pi]."""
    residual = math.pi - math.fmod(math.pi - phase, 2 * math.pi)
    if residual > math.pi:
        residual -= 2 * math.pi
    p = round((phase - residual) / (2 * math.pi))
    return p, residual


def round_trip_detunings(
    cavity: CavityGeometry, theta: float, crystal: PhysicalCrystal
) -> tuple[float, float, int, int]:
    """Residual round-trip phases of signal and idler.

    Returns ``(delta1, delta2, p1, p2)`` where ``delta_j`` is the offset of
    the round-trip phase from the nearest multiple ``2 pi p_j``.
    """
    # the mean phase needs the crystal's mean index and length
    delta = (
        crystal.omega0 / (2 * crystal.c)
        * (cavity.n_plate * cavity.e_plate + crystal.n_mean * crystal.l + cavity.L)
        + cavity.zeta_mean
    )
    split = 0.5 * (theta + cavity.zeta2 - cavity.zeta1)
    p1, d1 = _fold(delta + split - cavity.psi)
    p2, d2 = _fold(delta - split + cavity.psi)
    return d1, d2, p1, p2


def min_threshold_point(kappa, mu, rho, sigma, branch=1) -> OperatingPoint:
    _check_losses(kappa, mu)
    if rho < 0:
        raise ParameterOutOfRange(f"rho must be >= 0, got {rho}")
    if sigma < 0:
        raise ParameterOutOfRange(f"sigma must be >= 0, got {sigma}")
    if branch not in (1, -1):
        raise ParameterOutOfRange(f"branch must be +1 or -1, got {branch}")
    if rho > RHO_WARN:
        warnings.warn(f"waveplate angle rho={rho} is not small; the model assumes rho << 1")
    detuning = branch * 2.0 * rho
    return OperatingPoint(
        kappa=float(kappa),
        mu=float(mu),
        rho=float(rho),
        sigma=float(sigma),
        delta1=detuning,
        delta2=detuning,
        beta=math.pi / 2,
        branch=int(branch),
    )


def pump_input_amplitude(point: OperatingPoint, g: float) -> complex:
    """Input pump amplitude (phase reference 0) implied by ``sigma``."""
    if g == 0:
        return 0j
    return complex(point.sigma * point.mu_prime / g)


def steady_state(point: OperatingPoint, g: float = 1.0) -> SteadyState:
    """Phase-locked stationary solution at the minimum-threshold point.

    The signal/idler phases are fixed at ``phi1 = -branch pi/4`` and
    ``phi2 = +branch pi/4`` (sum equal to the pump phase, 0). The common
    amplitude is the root of the gain-clamping condition ``g A0 = mu'``
    with ``A0 = A0_in - (g/2) A1 A2``.
    """
    if point.sigma < 1:
        raise BelowThreshold(f"sigma={point.sigma} is below the oscillation threshold")
    if g <= 0:
        raise ParameterOutOfRange(f"coupling g must be positive, got {g}")
    if not point.is_min_threshold:
        raise ParameterOutOfRange("steady_state requires a minimum-threshold operating point")

    mup = point.mu_prime
    a0_in = pump_input_amplitude(point, g).real
    phi1 = -point.branch * math.pi / 4
    phi2 = point.branch * math.pi / 4

    # phases are aligned with the pump, so the pump line stays real
    def clamp(r):
        return g * (a0_in - 0.5 * g * r * r) - mup

    if point.sigma == 1.0 or clamp(0.0) <= 0.0:
        # at threshold (up to rounding of g * A0_in) the bright fields vanish
        r = 0.0
    else:
        r_max = 10 * math.sqrt(2 * mup * point.sigma) / g
        try:
            r, info = optimize.brentq(
                clamp, 0.0, r_max, xtol=1e-14, rtol=4 * np.finfo(float).eps,
                maxiter=200, full_output=True,
            )
        except (RuntimeError, ValueError) as exc:
            raise NoConvergence(f"steady-state root search failed: {exc}") from exc
        if not info.converged:
            raise NoConvergence(f"steady-state root search did not converge: {info.flag}")

    a1 = r * np.exp(1j * phi1)
    a2 = r * np.exp(1j * phi2)
    a0 = complex(a0_in - 0.5 * g * a1 * a2)
    state = SteadyState(r=float(r), phi1=phi1, phi2=phi2, a0=a0, g=float(g))
    res = classical_residual(point, state)
    if res > 1e-10:
        raise NoConvergence(f"steady state residual {res:.3e} exceeds 1e-10")
    return state


def classical_residual(point: OperatingPoint, state: SteadyState) -> float:
    """Norm of the stationary field equations, plus pump-relation mismatch.

    The pump line ``A0 = A0_in - (g/2) A1 A2`` is substituted into the two
    field equations; the stored ``a0`` must also satisfy it (entering as
    ``g * (a0 - A0)``), so a state with a stale pump amplitude is rejected.
    """
    a1, a2, g = state.a1, state.a2, state.g
    a0 = pump_input_amplitude(point, g) - 0.5 * g * a1 * a2
    plate = 2j * point.rho * np.exp(1j * point.beta)
    mup = point.mu_prime
    e1 = a1 * (-mup + 1j * point.delta1) + g * a0 * np.conj(a2) + plate * a2
    e2 = a2 * (-mup + 1j * point.delta2) + g * a0 * np.conj(a1) + 2j * point.rho * np.exp(-1j * point.beta) * a1
    e0 = g * (state.a0 - a0)
    return float(np.sqrt(abs(e1) ** 2 + abs(e2) ** 2 + abs(e0) ** 2))
