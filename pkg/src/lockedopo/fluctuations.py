"""Linearized fluctuations in the Fourier domain and output covariances.

The fluctuation vector is ``(dA1, dA1*, dA2, dA2*)`` and the ten input
components are the ``(da, da*)`` pairs of the ports, in this order: coupler
ports of signal and idler, loss ports of signal and idler, pump port. Every
port carries vacuum noise of unit quadrature variance.

Frequencies are the normalized ``Omega = omega tau / (2 mu')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentState, SingularSystem
from .model import OperatingPoint, SteadyState, classical_residual, pump_input_amplitude

N_PORTS = 5
COND_LIMIT = 1e14
SOLVE_RTOL = 1e-12

# swaps each (a, a*) pair; conjugation symmetry is P @ X @ P == conj(X)
_PAIR_SWAP4 = np.kron(np.eye(2), [[0, 1], [1, 0]])
_PAIR_SWAP10 = np.kron(np.eye(N_PORTS), [[0, 1], [1, 0]])
# (x, p) of one vacuum port -> (a, a*)
_PORT_VACUUM = np.kron(np.eye(N_PORTS), [[0.5, 0.5j], [0.5, -0.5j]])


@dataclass(frozen=True, eq=False)
class FluctuationSystem:
    drift: np.ndarray
    input_couplings: np.ndarray
    tau: float
    mu_prime: float
    kappa: float


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    omega: float
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetrized quadrature covariance over ``(x1, p1, x2, p2)``.

    Vacuum has unit variance. ``divergent`` holds an orthonormal basis (rows)
    of quadrature directions whose noise diverges at this frequency; any
    entry touching them reads ``inf`` in ``m``, while ``regular`` keeps the
    finite part used for combinations orthogonal to those directions.

    When built by the solver, ``factor`` holds the complex map from the
    normalized vacuum inputs to the quadratures (``regular = Re(F F^H)``).
    Combination variances are then taken as ``|c F|^2``, which avoids the
    cancellation of large individual-beam variances in ``c m c``.
    """

    omega: float
    m: np.ndarray
    divergent: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    regular: np.ndarray | None = None
    factor: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if self.regular is None:
            object.__setattr__(self, "regular", m)
        object.__setattr__(self, "divergent", np.atleast_2d(np.asarray(self.divergent, dtype=float)).reshape(-1, 4))
        if len(self.divergent):
            bad = np.abs(self.divergent).max(axis=0) > 1e-9
            m = self.regular.copy()
            m[bad, :] = np.inf
            m[:, bad] = np.inf
        object.__setattr__(self, "m", m)

    @classmethod
    def from_factor(cls, omega: float, factor: np.ndarray, divergent=None) -> CovarianceMatrix:
        regular = (factor @ factor.conj().T).real
        regular = 0.5 * (regular + regular.T)
        if divergent is None:
            divergent = np.zeros((0, 4))
        return cls(float(omega), regular, divergent, regular, factor)

    @property
    def is_divergent(self) -> bool:
        return len(self.divergent) > 0

    def is_finite(self, c) -> bool:
        c = np.asarray(c, dtype=float)
        if not self.is_divergent:
            return True
        return bool(np.linalg.norm(self.divergent @ c) <= 1e-9 * max(np.linalg.norm(c), 1.0))

    def variance(self, c) -> float:
        """Variance of the real quadrature combination ``c . q``."""
        return self.covariance(c, c)

    def covariance(self, c1, c2) -> float:
        c1 = np.asarray(c1, dtype=float)
        c2 = np.asarray(c2, dtype=float)
        if not (self.is_finite(c1) and self.is_finite(c2)):
            return np.inf
        if self.factor is not None:
            return float(np.real(np.vdot(c2 @ self.factor, c1 @ self.factor)))
        return float(c1 @ self.regular @ c2)

    def transform(self, t: np.ndarray) -> CovarianceMatrix:
        """Covariance of the linearly transformed quadratures ``t @ q``."""
        t = np.asarray(t, dtype=float)
        div = self.divergent
        if len(div):
            # c' . (t q) is finite iff t^T c' is orthogonal to div
            div = _orthonormal_rows(div @ t.T)
        if self.factor is not None:
            return CovarianceMatrix.from_factor(self.omega, t @ self.factor, div)
        regular = t @ self.regular @ t.T
        return CovarianceMatrix(self.omega, regular, div, regular)


def _orthonormal_rows(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    if vectors.size == 0:
        return np.zeros((0, 4))
    u, s, _ = np.linalg.svd(vectors.T, full_matrices=False)
    rank = int(np.sum(s > tol * max(s.max(), 1.0)))
    return u[:, :rank].T


def build_system(point: OperatingPoint, state: SteadyState) -> FluctuationSystem:
    res = classical_residual(point, state)
    if res > 1e-10:
        raise InconsistentState(f"steady state does not solve the classical equations (residual {res:.3e})")

    g, a1, a2 = state.g, state.a1, state.a2
    mup = point.mu_prime
    a0 = pump_input_amplitude(point, g) - 0.5 * g * a1 * a2
    plate12 = 2j * point.rho * np.exp(1j * point.beta)
    plate21 = 2j * point.rho * np.exp(-1j * point.beta)

    # unstarred rows; pump fluctuation dA0 = dA0in - (g/2)(A2 dA1 + A1 dA2) substituted
    row1 = np.zeros(4, complex)
    row1[0] = -mup + 1j * point.delta1 - 0.5 * g * g * np.conj(a2) * a2
    row1[2] = plate12 - 0.5 * g * g * np.conj(a2) * a1
    row1[3] = g * a0
    row2 = np.zeros(4, complex)
    row2[2] = -mup + 1j * point.delta2 - 0.5 * g * g * np.conj(a1) * a1
    row2[0] = plate21 - 0.5 * g * g * np.conj(a1) * a2
    row2[1] = g * a0

    couple1 = np.zeros(2 * N_PORTS, complex)
    couple2 = np.zeros(2 * N_PORTS, complex)
    couple1[0] = couple2[2] = np.sqrt(2 * point.kappa)
    couple1[4] = couple2[6] = np.sqrt(2 * point.mu)
    couple1[8] = g * np.conj(a2)
    couple2[8] = g * np.conj(a1)

    drift = np.array([row1, np.conj(row1 @ _PAIR_SWAP4), row2, np.conj(row2 @ _PAIR_SWAP4)])
    inputs = np.array([couple1, np.conj(couple1 @ _PAIR_SWAP10), couple2, np.conj(couple2 @ _PAIR_SWAP10)])
    return FluctuationSystem(drift=drift, input_couplings=inputs, tau=1.0, mu_prime=mup, kappa=point.kappa)


def _system_matrices(system: FluctuationSystem, omegas: np.ndarray) -> np.ndarray:
    # tau = 1 normalization: omega tau = 2 mu' Omega
    w = 2 * system.mu_prime * omegas
    return 1j * w[:, None, None] * np.eye(4) - system.drift


def _output_map(system: FluctuationSystem, cavity: np.ndarray) -> np.ndarray:
    # dA_out = sqrt(2 kappa) dA - dA_in on the coupler ports
    out = np.sqrt(2 * system.kappa) * cavity
    out[..., :, :4] -= np.eye(4)
    return out


def _solve(system: FluctuationSystem, omegas: np.ndarray) -> np.ndarray:
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas < 0):
        raise ValueError("analysis frequencies must be >= 0")
    a = _system_matrices(system, omegas)
    cond = np.linalg.cond(a)
    if np.any(~np.isfinite(cond) | (cond > COND_LIMIT)):
        bad = omegas[~np.isfinite(cond) | (cond > COND_LIMIT)]
        raise SingularSystem(f"fluctuation system is singular at Omega={bad[0]!r}")
    b = np.broadcast_to(system.input_couplings, (len(omegas), 4, 2 * N_PORTS))
    x = np.linalg.solve(a, b)
    resid = np.linalg.norm(a @ x - b, axis=(1, 2))
    scale = np.linalg.norm(a, axis=(1, 2)) * np.linalg.norm(x, axis=(1, 2)) + np.linalg.norm(b, axis=(1, 2))
    if np.any(resid > SOLVE_RTOL * scale):
        raise SingularSystem("linear solve residual exceeds tolerance")
    return _output_map(system, x)


def transfer_matrix(system: FluctuationSystem, omega: float) -> TransferMatrix:
    return TransferMatrix(float(omega), _solve(system, [omega])[0])


def quadrature_map(phi1: float, phi2: float) -> np.ndarray:
    """Matrix taking ``(dA1, dA1*, dA2, dA2*)`` to ``(x1, p1, x2, p2)``."""
    q = np.zeros((4, 4), complex)
    for j, phi in enumerate((phi1, phi2)):
        e = np.exp(-1j * phi)
        q[2 * j, 2 * j : 2 * j + 2] = [e, np.conj(e)]
        q[2 * j + 1, 2 * j : 2 * j + 2] = [-1j * e, 1j * np.conj(e)]
    return q


def covariance_spectrum(system: FluctuationSystem, omegas, phi1: float, phi2: float) -> list[CovarianceMatrix]:
    """Output covariances over a frequency grid (vectorized solve)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    q = quadrature_map(phi1, phi2)
    zero = omegas == 0
    result: list[CovarianceMatrix | None] = [None] * len(omegas)
    if np.any(zero):
        try:
            t0 = _solve(system, [0.0])
        except SingularSystem:
            cov0 = _divergent_covariance(system, q)
        else:
            cov0 = CovarianceMatrix.from_factor(0.0, q @ t0[0] @ _PORT_VACUUM)
        for i in np.flatnonzero(zero):
            result[i] = cov0
    if np.any(~zero):
        idx = np.flatnonzero(~zero)
        factors = q @ _solve(system, omegas[idx]) @ _PORT_VACUUM
        for i, f in zip(idx, factors):
            result[i] = CovarianceMatrix.from_factor(omegas[i], f)
    return result  # type: ignore[return-value]


def output_covariance(system: FluctuationSystem, omega: float, phi1: float, phi2: float) -> CovarianceMatrix:
    return covariance_spectrum(system, [omega], phi1, phi2)[0]


def _zero_projector(a: np.ndarray) -> np.ndarray:
    """Spectral projector of ``a`` onto its (generalized) null space."""
    eig = np.linalg.eigvals(a)
    scale = max(1.0, np.linalg.norm(a))
    small = np.abs(eig) <= 1e-9 * scale
    if not np.any(small):
        return np.zeros_like(a)
    far = np.abs(eig[~small])
    radius = 0.5 * far.min() if far.size else scale
    # trapezoidal rule on a circle is spectrally accurate for the resolvent
    n = 128
    z = radius * np.exp(2j * np.pi * np.arange(n) / n)
    eye = np.eye(len(a))
    return sum(zk * np.linalg.inv(zk * eye - a) for zk in z) / n


def _divergent_covariance(system: FluctuationSystem, q: np.ndarray) -> CovarianceMatrix:
    a = _system_matrices(system, np.array([0.0]))[0]
    p0 = _zero_projector(a)
    # Drazin inverse: finite part of the resolvent as Omega -> 0
    eye = np.eye(4)
    drazin = np.linalg.solve(a + p0, eye - p0)
    t = _output_map(system, drazin @ system.input_couplings)
    directions = q @ p0
    div = _orthonormal_rows(np.hstack([directions.real, directions.imag]).T)
    return CovarianceMatrix.from_factor(0.0, q @ t @ _PORT_VACUUM, div)


def rotate_quadratures(cov: CovarianceMatrix, a1: float, a2: float) -> CovarianceMatrix:
    """Rotate each beam's ``(x, p)`` pair: ``x' = cos a x - sin a p``, ``p' = sin a x + cos a p``."""
    t = np.zeros((4, 4))
    for j, a in enumerate((a1, a2)):
        c, s = np.cos(a), np.sin(a)
        t[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = [[c, -s], [s, c]]
    return cov.transform(t)


SYMPLECTIC_FORM = np.kron(np.eye(2), [[0.0, 1.0], [-1.0, 0.0]])


def min_symplectic_eigenvalue(cov: CovarianceMatrix) -> float:
    """Smallest eigenvalue of ``m + iJ``; negative values flag an unphysical matrix."""
    return float(np.linalg.eigvalsh(cov.m + 1j * SYMPLECTIC_FORM).min())


def point_covariances(point: OperatingPoint, omegas, g: float = 1.0) -> list[CovarianceMatrix]:
    """Steady state, linearization and output covariances for one operating point."""
    from .model import steady_state

    state = steady_state(point, g)
    system = build_system(point, state)
    return covariance_spectrum(system, omegas, state.phi1, state.phi2)
