"""Taxis curve and light field against independently computed values.

Reference numbers below were produced with 40-digit mpmath arithmetic
(root finding on the sine balance, closed-form beta inversion) and are
frozen here to full double precision.
"""

import numpy as np
import pytest

from photobio.photoresponse import (
    CalibrationError,
    Photoresponse,
    calibrate_beta,
    chi,
    light_field,
    solve_chi_star,
)

CHI_STAR_REF = 0.64413599873538892
BETA_066_REF = 0.071558685442778824
BETA_0495_REF = -0.52148934534898243


def test_chi_closed_form():
    # chi(0.5; beta=1) = 0.5 * exp(-0.5)
    assert chi(0.5, 1.0) == pytest.approx(0.30326532985631671, abs=1e-16)
    # beta = 0 reduces chi to the identity
    assert chi(0.7, 0.0) == 0.7


def test_chi_star_root():
    c = solve_chi_star()
    assert c == pytest.approx(CHI_STAR_REF, abs=1e-13)
    bal = 0.8 * np.sin(1.5 * np.pi * c) - 0.1 * np.sin(0.5 * np.pi * c)
    assert abs(bal) < 1e-13


def test_M_endpoint_values():
    r = Photoresponse(beta=0.0)
    assert r.M(0.0) == 0.0
    # chi(1) = 1 regardless of beta: M(1) = -0.8 - 0.1
    assert r.M(1.0) == pytest.approx(-0.9, abs=1e-15)
    r2 = Photoresponse(beta=calibrate_beta(0.66))
    assert r2.M(1.0) == pytest.approx(-0.9, abs=1e-15)


def test_M_at_known_chi():
    # beta = 0 makes chi the identity, so M(0.6) is the pure sine balance
    r = Photoresponse(beta=0.0)
    assert r.M(0.6) == pytest.approx(0.16631189606246320, abs=1e-15)


def test_M_bounded():
    r = Photoresponse(beta=calibrate_beta(0.66))
    I = np.linspace(0.0, 1.0, 2001)
    assert np.max(np.abs(r.M(I))) <= 0.9 + 1e-12


def test_M_sign_change_at_I_c():
    for I_c in (0.66, 0.63, 0.52, 0.495):
        r = Photoresponse(beta=calibrate_beta(I_c), I_c=I_c)
        assert r.M(I_c) == pytest.approx(0.0, abs=1e-12)
        assert r.M(I_c - 0.01) > 0.0
        assert r.M(I_c + 0.01) < 0.0


def test_calibrate_beta_frozen_values():
    assert calibrate_beta(0.66) == pytest.approx(BETA_066_REF, abs=1e-12)
    assert calibrate_beta(0.495) == pytest.approx(BETA_0495_REF, abs=1e-12)


def test_calibrate_beta_rejects_bad_target():
    with pytest.raises(CalibrationError):
        calibrate_beta(1.5)
    with pytest.raises(CalibrationError):
        calibrate_beta(0.0)


def test_locate_I_c_round_trip():
    beta = calibrate_beta(0.66)
    r = Photoresponse(beta=beta)
    assert r.I_c == pytest.approx(0.66, abs=1e-12)


def test_M_prime_matches_finite_difference():
    r = Photoresponse(beta=calibrate_beta(0.66))
    # frozen 40-digit value at I = 0.8
    assert r.M_prime(0.8) == pytest.approx(-3.3511611564476713, rel=1e-13)
    h = 1e-6
    for I in (0.3, 0.55, 0.9):
        fd = (r.M(I + h) - r.M(I - h)) / (2 * h)
        assert r.M_prime(I) == pytest.approx(fd, rel=1e-8)


def test_light_field_uniform_column():
    # constant n = 1: I(z) = I_t exp(-kappa (1 - z)) exactly under trapezoid
    Nx, Nz = 4, 50
    dz = 1.0 / Nz
    n = np.ones((Nx, Nz + 1))
    I = light_field(n, kappa=0.5, I_t=1.0, dz=dz)
    z = np.linspace(0.0, 1.0, Nz + 1)
    ref = np.exp(-0.5 * (1.0 - z))
    assert np.allclose(I, ref[None, :], rtol=1e-13, atol=0)
    assert np.all(I[:, -1] == 1.0)


def test_light_field_gaussian_column_quadrature():
    # non-uniform column checked against adaptive quadrature
    from scipy.integrate import quad

    Nz = 400
    dz = 1.0 / Nz
    z = np.linspace(0.0, 1.0, Nz + 1)
    prof = 1.0 + 2.0 * np.exp(-((z - 0.7) ** 2) / 0.02)
    I = light_field(prof[None, :], kappa=1.0, I_t=1.0, dz=dz)[0]
    f = lambda s: 1.0 + 2.0 * np.exp(-((s - 0.7) ** 2) / 0.02)
    for j in (0, 100, 250, 399):
        tau, _ = quad(f, z[j], 1.0, epsabs=1e-13, epsrel=1e-13)
        assert I[j] == pytest.approx(np.exp(-tau), rel=2e-5)


def test_light_field_monotone_in_depth():
    rng = np.random.default_rng(7)
    n = rng.uniform(0.2, 2.0, size=(8, 65))
    I = light_field(n, kappa=0.8, I_t=1.0, dz=1.0 / 64)
    assert np.all(np.diff(I, axis=1) >= 0.0)


def test_light_field_shadowing():
    # adding mass above a level can only dim the light there
    Nz = 64
    dz = 1.0 / Nz
    base = np.ones((1, Nz + 1))
    heavier = base.copy()
    heavier[0, 40:] += 1.0
    I0 = light_field(base, 1.0, 1.0, dz)
    I1 = light_field(heavier, 1.0, 1.0, dz)
    assert np.all(I1[0, :40] < I0[0, :40])


def test_light_field_rejects_negative():
    n = np.ones((2, 11))
    n[1, 3] = -1e-3
    with pytest.raises(ValueError):
        light_field(n, 1.0, 1.0, 0.1)
