import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import constants

from lockedopo.errors import BelowThreshold, FrequencyMismatch, ParameterOutOfRange
from lockedopo.model import (
    CavityGeometry,
    PhysicalCrystal,
    SteadyState,
    classical_residual,
    coupling_constant,
    crystal_birefringence,
    min_threshold_point,
    round_trip_detunings,
    steady_state,
)

C = constants.c


def crystal(n1=1.8, n2=1.9, l=0.01, chi2=2e-12, omega0=2 * C, n0=1.85):
    return PhysicalCrystal(n1=n1, n2=n2, l=l, chi2=chi2, omega0=omega0, n0=n0)


def test_birefringence_symmetric_indices_vanish():
    assert crystal_birefringence(crystal(n1=1.8, n2=1.8)) == 0.0


def test_birefringence_direct_value():
    # omega0 / 2c = 1 per meter
    cr = crystal(n1=1.8, n2=1.9, l=0.01, omega0=2 * C)
    assert crystal_birefringence(cr) == pytest.approx(0.001, rel=1e-12)


def test_birefringence_antisymmetric():
    a = crystal_birefringence(crystal(n1=1.7, n2=2.1))
    b = crystal_birefringence(crystal(n1=2.1, n2=1.7))
    assert a == -b


def test_coupling_zero_without_nonlinearity():
    cr = crystal(chi2=0.0)
    assert coupling_constant(cr, cr.omega0 / 2, cr.omega0 / 2) == 0.0


def test_coupling_linear_in_length():
    w = 2 * C
    g1 = coupling_constant(crystal(l=0.01), w / 2, w / 2)
    g2 = coupling_constant(crystal(l=0.02), w / 2, w / 2)
    assert g2 == pytest.approx(2 * g1, rel=1e-14)


def test_coupling_hand_evaluation():
    omega0 = 2.0 * np.pi * 2.8e14
    w1, w2 = 0.6 * omega0, 0.4 * omega0
    cr = PhysicalCrystal(n1=1.83, n2=1.74, l=0.01, chi2=3.2e-12, omega0=omega0, n0=1.79)
    hbar, eps0 = 1.054571817e-34, 8.8541878128e-12
    expected = 0.01 * 3.2e-12 * math.sqrt(
        hbar * omega0 * w1 * w2 / (2 * 299792458.0**3 * eps0 * 1.79 * 1.83 * 1.74)
    )
    got = coupling_constant(cr, w1, w2)
    assert got > 0 and math.isfinite(got)
    assert got == pytest.approx(expected, rel=1e-9)


def test_coupling_frequency_mismatch():
    cr = crystal()
    with pytest.raises(FrequencyMismatch):
        coupling_constant(cr, 0.5 * cr.omega0, 0.6 * cr.omega0)


def test_coupling_invariant_under_exchange():
    omega0 = 3e15
    a = coupling_constant(crystal(n1=1.7, n2=2.0, omega0=omega0), 0.3 * omega0, 0.7 * omega0)
    b = coupling_constant(crystal(n1=2.0, n2=1.7, omega0=omega0), 0.7 * omega0, 0.3 * omega0)
    assert a == pytest.approx(b, rel=1e-15)


def test_crystal_rejects_bad_index():
    with pytest.raises(ParameterOutOfRange):
        crystal(n1=0.9)


def cavity(**kw):
    base = dict(L=0.1, zeta1=0.0, zeta2=0.0, n_plate=1.5, e_plate=0.001, psi=0.0, rho=0.01,
                kappa=0.05, mu=0.0, tau=1e-9)
    base.update(kw)
    return CavityGeometry(**base)


def _mean_phase(cav, cr):
    return cr.omega0 / (2 * C) * (cav.n_plate * cav.e_plate + cr.n_mean * cr.l + cav.L) + cav.zeta_mean


def test_detunings_exact_resonance():
    # omega0/2c = 1/m, choose lengths so the mean phase is 2 pi * 40
    cr = crystal(n1=1.8, n2=1.8, l=0.01, omega0=2 * C)
    cav0 = cavity(L=0.0, e_plate=0.0)
    L = 2 * np.pi * 40 - _mean_phase(cav0, cr)
    d1, d2, p1, p2 = round_trip_detunings(cavity(L=L, e_plate=0.0), 0.0, cr)
    assert (p1, p2) == (40, 40)
    assert abs(d1) < 1e-12 and abs(d2) < 1e-12


def test_detunings_small_positive_residual():
    cr = crystal(n1=1.8, n2=1.8, l=0.01, omega0=2 * C)
    cav0 = cavity(L=0.0, e_plate=0.0)
    L = 2 * np.pi * 3 + 0.01 - _mean_phase(cav0, cr)
    d1, _, p1, _ = round_trip_detunings(cavity(L=L, e_plate=0.0), 0.0, cr)
    assert p1 == 3
    assert d1 == pytest.approx(0.01, abs=1e-12)


def test_detunings_invariant_under_plate_turn():
    cr = crystal()
    theta = crystal_birefringence(cr)
    a = round_trip_detunings(cavity(psi=0.3), theta, cr)
    b = round_trip_detunings(cavity(psi=0.3 + 2 * np.pi), theta, cr)
    assert a[0] == pytest.approx(b[0], abs=1e-9)
    assert a[1] == pytest.approx(b[1], abs=1e-9)
    for d in a[:2]:
        assert -np.pi < d <= np.pi


def test_cavity_validation():
    with pytest.raises(ParameterOutOfRange):
        cavity(kappa=0.3)
    with pytest.raises(ParameterOutOfRange):
        cavity(tau=0.0)
    with pytest.warns(UserWarning):
        cavity(rho=0.3)


def test_min_threshold_point_fig2():
    p = min_threshold_point(0.05, 0, 0.01, 1, +1)
    assert p.delta1 == p.delta2 == pytest.approx(0.02)
    assert p.mu_prime == 0.05
    assert p.beta == math.pi / 2


def test_min_threshold_point_no_plate_and_branch():
    p = min_threshold_point(0.05, 0, 0.0, 1)
    assert p.delta1 == p.delta2 == 0
    q = min_threshold_point(0.05, 0, 0.05, 1, -1)
    assert q.delta1 == q.delta2 == pytest.approx(-0.1)


@pytest.mark.parametrize("args", [(0, 0, 0.01, 1, 1), (0.05, 0.3, 0.01, 1, 1), (0.05, 0, -0.1, 1, 1),
                                  (0.05, 0, 0.01, -1, 1), (0.05, 0, 0.01, 1, 2)])
def test_min_threshold_point_rejects(args):
    with pytest.raises(ParameterOutOfRange):
        min_threshold_point(*args)


def test_steady_state_at_threshold():
    p = min_threshold_point(0.05, 0, 0.01, 1)
    s = steady_state(p)
    assert s.r == 0
    assert abs(s.g * s.a0) == pytest.approx(p.mu_prime, abs=1e-15)
    assert classical_residual(p, s) == 0.0


def test_steady_state_above_threshold_matches_rederived_amplitude():
    p = min_threshold_point(0.05, 0.01, 0.02, 4)
    g = 0.7
    s = steady_state(p, g)
    # independent re-derivation: g r^2 / 2 = (mu'/g)(sigma - 1)
    assert s.r**2 == pytest.approx(2 * p.mu_prime * (p.sigma - 1) / g**2, rel=1e-12)
    assert classical_residual(p, s) <= 1e-10
    assert abs(abs(s.g * s.a0) - p.mu_prime) <= 1e-10
    assert s.phi2 - s.phi1 == pytest.approx(math.pi / 2)


def test_steady_state_below_threshold():
    with pytest.raises(BelowThreshold):
        steady_state(min_threshold_point(0.05, 0, 0.01, 0.5))


def test_residual_detects_perturbation():
    p = min_threshold_point(0.05, 0, 0.01, 4)
    s = steady_state(p)
    bad = SteadyState(1.1 * s.r, s.phi1, s.phi2, s.a0, s.g)
    assert classical_residual(p, bad) > 1e-6


def test_wrong_phase_pairing_is_not_stationary():
    p = min_threshold_point(0.05, 0, 0.05, 2)
    s = steady_state(p)
    swapped = SteadyState(s.r, s.phi2, s.phi1, s.a0, s.g)
    assert classical_residual(p, swapped) > 1e-4


def test_branch_symmetry():
    plus = steady_state(min_threshold_point(0.05, 0.02, 0.03, 2.5, 1))
    minus = steady_state(min_threshold_point(0.05, 0.02, 0.03, 2.5, -1))
    assert minus.a1 == pytest.approx(np.conj(plus.a1), abs=1e-15)
    assert minus.a2 == pytest.approx(np.conj(plus.a2), abs=1e-15)
    assert minus.a0 == pytest.approx(np.conj(plus.a0), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    kappa=st.floats(1e-3, 0.2),
    mu=st.floats(0, 0.2),
    rho=st.floats(0, 0.2),
    sigma=st.floats(1, 20),
    branch=st.sampled_from([1, -1]),
    g=st.floats(1e-3, 1e3),
)
def test_steady_state_property(kappa, mu, rho, sigma, branch, g):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = min_threshold_point(kappa, mu, rho, sigma, branch)
    s = steady_state(p, g)
    assert classical_residual(p, s) <= 1e-10
    assert abs(abs(g * s.a0) - p.mu_prime) <= 1e-10
    assert s.r >= 0
    assert s.phi2 - s.phi1 == pytest.approx(branch * math.pi / 2)
