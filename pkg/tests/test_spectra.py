import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lockedopo.fluctuations import point_covariances
from lockedopo.model import min_threshold_point
from lockedopo.spectra import (
    P_MINUS,
    P_PLUS,
    X_MINUS,
    X_PLUS,
    JointSpectrumSelector,
    heisenberg_products,
    joint_spectrum,
    min_sx_minus,
    sp_plus_closed,
    sx_minus_closed,
)
from conftest import identity_cov


@pytest.mark.parametrize(
    "rho,omega,expected",
    [(0.0, 1.0, 0.5), (0.05, 0.0, 1.25), (0.01, 0.0, 7.25), (0.0, 1e3, 1.0)],
)
def test_sx_minus_hand_values(rho, omega, expected):
    point = min_threshold_point(0.05, 0.0, rho, 1.0)
    assert sx_minus_closed(point, omega) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("sigma,omega,expected", [(1.0, 0.0, 0.0), (2.0, 0.0, 0.75), (1.0, 1.0, 0.5)])
def test_sp_plus_hand_values(sigma, omega, expected):
    point = min_threshold_point(0.05, 0.0, 0.02, sigma)
    assert sp_plus_closed(point, omega) == pytest.approx(expected, abs=1e-15)


def test_sx_minus_zero_over_zero_limit():
    point = min_threshold_point(0.05, 0.03, 0.0, 1.0)
    assert sx_minus_closed(point, 0.0) == pytest.approx(0.03 / 0.08)
    assert sx_minus_closed(point, 1e-6) == pytest.approx(0.03 / 0.08, rel=1e-6)


def test_closed_forms_vectorize():
    point = min_threshold_point(0.05, 0.01, 0.03, 1.5)
    om = np.linspace(0, 3, 7)
    assert np.allclose(sx_minus_closed(point, om), [sx_minus_closed(point, w) for w in om])
    assert np.allclose(sp_plus_closed(point, om), [sp_plus_closed(point, w) for w in om])


@pytest.mark.parametrize("a", [0.04, 0.5, 4.0, 16.0])
def test_min_sx_minus_analytic(a):
    # lossless: minimum at Omega^2 = a + sqrt a with value 2 sqrt a / (2 sqrt a + 1)
    kappa = 0.05
    rho = np.sqrt(a) * kappa / 2
    om, val = min_sx_minus(min_threshold_point(kappa, 0.0, rho, 1.0))
    assert om == pytest.approx(np.sqrt(a + np.sqrt(a)), rel=1e-6)
    assert val == pytest.approx(2 * np.sqrt(a) / (2 * np.sqrt(a) + 1), rel=1e-10)


def test_min_sx_minus_named_points():
    om, val = min_sx_minus(min_threshold_point(0.05, 0.0, 0.05, 1.0))
    assert (om, val) == (pytest.approx(np.sqrt(6), rel=1e-6), pytest.approx(0.8, rel=1e-10))
    om, val = min_sx_minus(min_threshold_point(0.05, 0.0, 0.1, 1.0))
    assert (om, val) == (pytest.approx(np.sqrt(20), rel=1e-6), pytest.approx(8 / 9, rel=1e-10))


def test_min_sx_minus_at_rho_zero_is_dc():
    om, val = min_sx_minus(min_threshold_point(0.05, 0.0, 0.0, 1.0))
    assert om == 0.0 and val == 0.0


@settings(max_examples=40, deadline=None)
@given(kappa=st.floats(0.01, 0.2), mu=st.floats(0, 0.2), rho=st.floats(0, 0.2))
def test_min_sx_minus_beats_brute_force(kappa, mu, rho):
    point = min_threshold_point(kappa, mu, rho, 1.0)
    om, val = min_sx_minus(point)
    grid = np.linspace(0, 10 * max(1.0, 2 * rho / (kappa + mu)), 20001)
    assert val <= sx_minus_closed(point, grid).min() + 1e-12
    assert sx_minus_closed(point, om) == pytest.approx(val, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    kappa=st.floats(0.005, 0.2), mu=st.floats(0, 0.2), rho=st.floats(0, 0.2),
    sigma=st.floats(1, 5), omega=st.floats(0, 20),
)
def test_closed_form_invariants(kappa, mu, rho, sigma, omega):
    point = min_threshold_point(kappa, mu, rho, sigma)
    sx = sx_minus_closed(point, omega)
    sp = sp_plus_closed(point, omega)
    assert sx >= 0 and 0 <= sp <= 1
    # sigma only enters the phase sum, rho only the amplitude difference
    assert sx == sx_minus_closed(min_threshold_point(kappa, mu, rho, 1.0 + sigma), omega)
    assert sp == sp_plus_closed(min_threshold_point(kappa, mu, 0.0, sigma), omega)


def test_numerics_agree_with_closed_forms_on_grid():
    om = np.geomspace(1e-3, 10, 50)
    for rho, sigma in [(0.0, 1.0), (0.01, 1.0), (0.05, 2.0), (0.1, 1.3)]:
        point = min_threshold_point(0.05, 0.02, rho, sigma)
        covs = point_covariances(point, om)
        sx = np.array([joint_spectrum(c, X_MINUS) for c in covs])
        sp = np.array([joint_spectrum(c, P_PLUS) for c in covs])
        assert np.allclose(sx, sx_minus_closed(point, om), rtol=1e-9, atol=1e-12)
        assert np.allclose(sp, sp_plus_closed(point, om), rtol=1e-9, atol=1e-12)


def test_vacuum_values_and_selectors():
    cov = identity_cov(0.5)
    for sel in (X_PLUS, X_MINUS, P_PLUS, P_MINUS):
        assert joint_spectrum(cov, sel) == pytest.approx(1.0)
    assert heisenberg_products(cov) == (pytest.approx(1.0), pytest.approx(1.0))
    assert list(X_MINUS.vector) == [1, 0, -1, 0]
    assert list(P_PLUS.vector) == [0, 1, 0, 1]
    with pytest.raises(ValueError):
        JointSpectrumSelector("position", "sum")
    with pytest.raises(ValueError):
        JointSpectrumSelector("amplitude", "product")


def test_heisenberg_products_at_locked_point():
    covs = point_covariances(min_threshold_point(0.05, 0.0, 0.05, 1.0), np.geomspace(1e-3, 5, 40))
    for c in covs:
        minus, plus = heisenberg_products(c)
        assert minus >= 1 - 1e-9 and plus >= 1 - 1e-9
