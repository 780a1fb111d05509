"""Phototaxis response curve and Beer-Lambert light field.

The swimming response to light is a superposition of two sines,

    M(I) = 0.8 sin(3*pi/2 * chi(I)) - 0.1 sin(pi/2 * chi(I)),
    chi(I) = I * exp(beta * (I - 1)),

which is positive (upswimming) below the critical intensity I_c and
negative (downswimming) above it.  The shape parameter beta places the
reversal: M vanishes where chi(I) hits the nontrivial root chi* of
0.8 sin(3*pi*chi/2) = 0.1 sin(pi*chi/2), so beta is calibrated by
solving chi(I_c; beta) = chi*.

Light attenuates downward through the suspension by the Lambert-Beer
law, I(x, z) = I_t * exp(-kappa * integral_z^1 n dz'), evaluated per
column with the composite trapezoidal rule.
"""

import numpy as np
from scipy.optimize import brentq

# Bracket for the nontrivial root of 0.8 sin(3*pi*chi/2) - 0.1 sin(pi*chi/2);
# the sign change is re-verified at solve time.
CHI_STAR_BRACKET = (0.55, 0.665)
CHI_STAR_TOL = 1e-14

# Search bracket for the shape parameter in calibrate_beta.
BETA_BRACKET = (-10.0, 10.0)
BETA_TOL = 1e-13


class CalibrationError(ValueError):
    """Raised when no beta in the search bracket yields M(I_c) = 0."""


def chi(I, beta):
    """Inner map chi(I) = I * exp(beta * (I - 1)); accepts scalars or arrays."""
    I = np.asarray(I, dtype=float)
    out = I * np.exp(beta * (I - 1.0))
    return out if out.ndim else float(out)


def _chi_prime(I, beta):
    """d(chi)/dI = exp(beta*(I-1)) * (1 + beta*I)."""
    I = np.asarray(I, dtype=float)
    out = np.exp(beta * (I - 1.0)) * (1.0 + beta * I)
    return out if out.ndim else float(out)


def _sine_balance(c):
    return 0.8 * np.sin(1.5 * np.pi * c) - 0.1 * np.sin(0.5 * np.pi * c)


def solve_chi_star(bracket=CHI_STAR_BRACKET, tol=CHI_STAR_TOL):
    """Nontrivial root of the sine balance, the chi value where taxis reverses."""
    lo, hi = bracket
    flo, fhi = _sine_balance(lo), _sine_balance(hi)
    if flo * fhi >= 0.0:
        raise CalibrationError(
            f"sine balance has no sign change on [{lo}, {hi}]: f={flo:.3e}, {fhi:.3e}"
        )
    return brentq(_sine_balance, lo, hi, xtol=tol, rtol=8.9e-16)


class Photoresponse:
    """Taxis curve M(I) with a fixed shape parameter.

    Either ``beta`` is given directly or it is calibrated from a target
    critical intensity via :func:`calibrate_beta`.
    """

    def __init__(self, beta, I_c=None):
        self.beta = float(beta)
        self.chi_star = solve_chi_star()
        self.I_c = float(I_c) if I_c is not None else self._locate_I_c()

    def _locate_I_c(self):
        f = lambda I: chi(I, self.beta) - self.chi_star
        lo, hi = 1e-12, 1.0
        if f(lo) * f(hi) > 0.0:
            raise CalibrationError(
                f"M has no reversal intensity in (0, 1) for beta={self.beta}"
            )
        return brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16)

    def M(self, I):
        """Mean vertical swimming bias at intensity I, in [-0.9, 0.9]."""
        c = chi(I, self.beta)
        out = 0.8 * np.sin(1.5 * np.pi * c) - 0.1 * np.sin(0.5 * np.pi * c)
        return out if np.ndim(out) else float(out)

    def M_prime(self, I):
        """dM/dI, used by the linearized stability operator."""
        c = chi(I, self.beta)
        dMdc = 1.2 * np.pi * np.cos(1.5 * np.pi * c) - 0.05 * np.pi * np.cos(0.5 * np.pi * c)
        out = dMdc * _chi_prime(I, self.beta)
        return out if np.ndim(out) else float(out)


def calibrate_beta(I_c, bracket=BETA_BRACKET):
    """Find beta such that the taxis reversal sits exactly at I_c.

    Solves chi(I_c; beta) = chi* by bisection in beta; chi is monotone in
    beta at fixed I_c in (0, 1) since d(chi)/d(beta) = chi * (I_c - 1) != 0.
    """
    if not 0.0 < I_c < 1.0:
        raise CalibrationError(f"I_c must lie in (0, 1), got {I_c}")
    c_star = solve_chi_star()
    f = lambda b: chi(I_c, b) - c_star
    lo, hi = bracket
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0.0:
        raise CalibrationError(
            f"no beta in [{lo}, {hi}] places the reversal at I_c={I_c}"
        )
    return brentq(f, lo, hi, xtol=BETA_TOL, rtol=8.9e-16)


def light_field(n, kappa, I_t, dz):
    """Beer-Lambert intensity over a concentration field.

    Parameters
    ----------
    n : ndarray, shape (Nx, Nz+1)
        Cell concentration on grid nodes, column-major in x; must be
        nonnegative (negative input signals upstream solver corruption).
    kappa : float
        Extinction coefficient.
    I_t : float
        Incident intensity at the top wall z = 1.
    dz : float
        Uniform vertical node spacing.

    Returns
    -------
    ndarray of the same shape: I(x, z) = I_t * exp(-kappa * trapz(n, z..1)),
    with I(x, 1) = I_t exactly.
    """
    n = np.asarray(n, dtype=float)
    if n.ndim == 1:
        return light_field(n[None, :], kappa, I_t, dz)[0]
    if np.min(n) < 0.0:
        raise ValueError(
            f"negative concentration (min {np.min(n):.3e}) passed to light_field"
        )
    tau = np.empty_like(n)
    # per-column trapezoid of n from z_j up to the top, accumulated downward
    face = 0.5 * (n[:, 1:] + n[:, :-1]) * dz
    tau[:, -1] = 0.0
    tau[:, :-1] = np.cumsum(face[:, ::-1], axis=1)[:, ::-1]
    return I_t * np.exp(-kappa * tau)
