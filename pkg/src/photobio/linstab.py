"""Linear onset analysis about the quiescent stratified equilibrium.

Normal modes psi' = Psi(z) e^{ikx + sigma t}, n' = i Phi(z) e^{ikx + sigma t}
reduce, after factoring out the quadrature phase, to a real generalized
eigenvalue problem in the amplitudes (Psi, Phi):

  sigma (D^2 - k^2) Psi = Sc (D^2 - k^2)^2 Psi - Sc R k Phi
  sigma Phi = k n_s' Psi - Vc d/dz[(M - kappa n_s M' I_s T) Phi]
              + (D^2 - k^2) Phi

where T is the integral from z to the top wall (the light perturbation
carried down a column) and all coefficients are evaluated on the
equilibrium profile.  Walls: Psi = 0 on both, D Psi = 0 at the rigid
bottom (ghost node Psi_{-1} = Psi_1), D^2 Psi = 0 at the stress-free
top (ghost Psi_{Nz+1} = -Psi_{Nz-1}); the cell field satisfies zero
wall-normal total flux, imposed as algebraic constraint rows with
vanishing rows in the mass matrix.

Two solvers share one assembly:
  * sigma_spectrum / leading_mode: QZ on (A0 + R A1, B) for growth rates,
  * neutral_rayleigh: the neutral condition det(A0 + R A1) = 0 is itself
    a generalized eigenvalue problem in R, one QZ call per wavenumber.

critical_point minimizes the neutral curve over k and cross-checks the
result against the sigma formulation to guard against an oscillatory
crossing that a zero-sigma solve would miss.
"""

import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from .basic_state import solve_basic_state

K_RANGE = (0.5, 20.0)
N_K = 64


class OnsetError(RuntimeError):
    """No minimum found inside the wavenumber window (or no instability)."""


@dataclass(frozen=True)
class ModeResult:
    """Leading eigenvalue and real mode shapes on the z nodes."""
    sigma: complex
    k: float
    R: float
    z: np.ndarray
    Psi: np.ndarray     # (Nz+1,) with the wall zeros included
    Phi: np.ndarray     # (Nz+1,) quadrature amplitude: n' = -Phi sin(kx)


@dataclass(frozen=True)
class NeutralCurveResult:
    """Sampled neutral curve plus the refined critical point.

    sigma_of(R, k) re-solves the growth-rate eigenproblem on the same
    equilibrium, so downstream callers can query stability anywhere
    without reassembling the pipeline by hand.
    """
    R_c: float
    k_c: float
    lambda_c: float
    Nz: int
    k_samples: np.ndarray
    R_neutral: np.ndarray
    sigma_at_crit: float    # max growth rate at (k_c, R_c); zero to ~1e-8
    sigma_below: float      # max growth rate at (k_c, 0.95 R_c); < 0
    params: object = dataclasses.field(repr=False, compare=False, default=None)
    basic: object = dataclasses.field(repr=False, compare=False, default=None)

    def sigma_of(self, R, k=None):
        """Largest Re(sigma) at (R, k); defaults to the critical k."""
        return sigma_max(self.params, self.basic,
                         self.k_c if k is None else k, R)

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write("k,R_neutral\n")
            for k, R in zip(self.k_samples, self.R_neutral):
                f.write(f"{k!r},{R!r}\n")

    def summary_line(self):
        return f"k_c = {self.k_c!r}  R_c = {self.R_c!r}  lambda_c = {self.lambda_c!r}\n"


def build_pencil(params, basic, k):
    """Dense (A0, A1, B) for wavenumber k; A = A0 + R*A1."""
    p = params
    Nz = basic.z.size - 1
    dz = basic.z[1] - basic.z[0]
    NI, NP = Nz - 1, Nz + 1
    N = NI + NP
    resp = p.photoresponse()
    M = resp.M(basic.I_s)
    Mp = resp.M_prime(basic.I_s)

    T = np.zeros((NP, NP))
    for j in range(NP - 1):
        T[j, j] = 0.5 * dz
        T[j, j + 1:NP - 1] = dz
        T[j, NP - 1] = 0.5 * dz
    C = np.diag(M) - np.diag(p.kappa * basic.n_s * Mp * basic.I_s) @ T

    A0 = np.zeros((N, N))
    A1 = np.zeros((N, N))
    B = np.zeros((N, N))
    dz2, dz4 = dz ** 2, dz ** 4
    k2 = k * k

    # ---- stream-function rows: nodes j = 1 .. Nz-1 -> rows 0 .. NI-1
    for i in range(NI):
        j = i + 1
        # D^2 - k^2 (Dirichlet walls), both in B and in the -2 k^2 D^2 part
        d2 = {}
        for off, c in ((-1, 1.0), (0, -2.0), (1, 1.0)):
            jj = j + off
            if 1 <= jj <= Nz - 1:
                d2[jj - 1] = d2.get(jj - 1, 0.0) + c / dz2
        # D^4 with the wall ghosts folded in
        d4 = {}
        for off, c in ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)):
            jj = j + off
            if jj == -1:
                jj, sgn = 1, 1.0          # rigid bottom: Psi_{-1} = Psi_1
            elif jj == Nz + 1:
                jj, sgn = Nz - 1, -1.0    # free top: Psi_{Nz+1} = -Psi_{Nz-1}
            else:
                sgn = 1.0
            if 1 <= jj <= Nz - 1:
                d4[jj - 1] = d4.get(jj - 1, 0.0) + sgn * c / dz4
        for col, v in d2.items():
            A0[i, col] += p.Sc * (-2.0 * k2 * v)
            B[i, col] += v
        for col, v in d4.items():
            A0[i, col] += p.Sc * v
        A0[i, i] += p.Sc * k2 * k2
        B[i, i] += -k2
        A1[i, NI + j] = -p.Sc * k     # buoyancy coupling, one unit of R

    # ---- cell rows: nodes j = 0 .. Nz -> rows NI .. NI+Nz
    for j in range(1, Nz):
        r = NI + j
        A0[r, j - 1] += k * basic.dns_dz[j]
        A0[r, NI:] += -p.Vc * (C[j + 1, :] - C[j - 1, :]) / (2.0 * dz)
        A0[r, NI + j - 1] += 1.0 / dz2
        A0[r, NI + j] += -2.0 / dz2 - k2
        A0[r, NI + j + 1] += 1.0 / dz2
        B[r, r] = 1.0

    # zero total wall-normal flux, second-order one-sided derivative
    r = NI
    A0[r, NI:] += p.Vc * C[0, :]
    A0[r, NI + 0] += 3.0 / (2.0 * dz)
    A0[r, NI + 1] += -4.0 / (2.0 * dz)
    A0[r, NI + 2] += 1.0 / (2.0 * dz)
    r = NI + Nz
    A0[r, NI:] += p.Vc * C[Nz, :]
    A0[r, NI + Nz] += -3.0 / (2.0 * dz)
    A0[r, NI + Nz - 1] += 4.0 / (2.0 * dz)
    A0[r, NI + Nz - 2] += -1.0 / (2.0 * dz)
    return A0, A1, B


def _finite(w):
    return w[np.isfinite(w)]


def sigma_spectrum(params, basic, k, R):
    A0, A1, B = build_pencil(params, basic, k)
    w = linalg.eig(A0 + R * A1, B, right=False)
    return _finite(w)


def sigma_max(params, basic, k, R):
    """Largest growth rate Re(sigma) over the finite spectrum."""
    return float(np.max(sigma_spectrum(params, basic, k, R).real))


def leading_mode(params, basic, k, R):
    """Eigenpair with the largest Re(sigma), shapes made real and scaled."""
    A0, A1, B = build_pencil(params, basic, k)
    w, v = linalg.eig(A0 + R * A1, B)
    ok = np.isfinite(w)
    w, v = w[ok], v[:, ok]
    idx = int(np.argmax(w.real))
    vec = v[:, idx]
    # common complex phase: rotate the largest component onto the real axis
    pivot = vec[int(np.argmax(np.abs(vec)))]
    vec = (vec * np.conj(pivot) / abs(pivot)).real
    Nz = basic.z.size - 1
    Psi = np.zeros(Nz + 1)
    Psi[1:Nz] = vec[:Nz - 1]
    Phi = vec[Nz - 1:]
    scale = np.max(np.abs(Psi))
    if scale < 1e-12 * np.max(np.abs(Phi)):
        scale = np.max(np.abs(Phi))
    Psi, Phi = Psi / scale, Phi / scale
    if Psi[np.argmax(np.abs(Psi))] < 0:
        Psi, Phi = -Psi, -Phi
    return ModeResult(sigma=complex(w[idx]), k=k, R=R, z=basic.z.copy(),
                      Psi=Psi, Phi=Phi)


def neutral_rayleigh(params, basic, k):
    """Smallest R > 0 with a zero growth rate at this wavenumber.

    det(A0 + R A1) = 0 is solved as a generalized eigenproblem in R;
    returns inf when the column never destabilizes at this k.
    """
    A0, A1, B = build_pencil(params, basic, k)
    w = linalg.eig(A0, -A1, right=False)
    w = _finite(w)
    real = w.real[(np.abs(w.imag) <= 1e-8 * np.abs(w.real)) & (w.real > 0)]
    return float(np.min(real)) if real.size else np.inf


def _sigma_nearest_zero(params, basic, k, R):
    """Growth rate of the mode closest to neutrality, to near machine precision.

    The QZ rightmost eigenvalue carries absolute noise ~ ||A|| eps (the
    fourth-difference rows reach 1/dz^4), which floors it around 1e-7.
    Inverting about zero instead -- sigma = 1 / (largest eigenvalue of
    A^{-1} B) -- keeps the error relative, so the crossing can be pinned
    far below that floor.  Near onset the rightmost mode is also the one
    nearest zero, which is the regime this is used in.
    """
    A0, A1, B = build_pencil(params, basic, k)
    with warnings.catch_warnings():
        # solving with A nearly singular is the point here (inverse
        # iteration at the root); the extremal eigenvalue stays accurate
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        w = linalg.eigvals(linalg.solve(A0 + R * A1, B))
    w = w[np.isfinite(w)]
    mu = w[np.argmax(np.abs(w))]
    return float((1.0 / mu).real)


def _polish_neutral(params, basic, k, R0):
    """Secant iteration driving the near-neutral Re(sigma) to ~0 at fixed k.

    The R-eigenvalue solve assumes the crossing happens through a real
    zero; re-solving the sigma problem and polishing removes both that
    assumption and the residual of the k minimization.
    """
    R = R0
    s = _sigma_nearest_zero(params, basic, k, R)
    dR = 1e-4 * R0
    for _ in range(12):
        if abs(s) < 1e-10:
            break
        s2 = _sigma_nearest_zero(params, basic, k, R + dR)
        slope = (s2 - s) / dR
        if slope == 0.0:
            break
        R_new = R - s / slope
        dR = R_new - R if R_new != R else dR
        R, s = R_new, _sigma_nearest_zero(params, basic, k, R_new)
    return R, s


def critical_point(params, Nz=128, k_range=K_RANGE, n_k=N_K):
    """Minimize the neutral curve over k; returns a NeutralCurveResult.

    The minimum must fall strictly inside k_range, otherwise OnsetError
    asks for a wider window.  A growth-rate cross-check at the result
    guards against an undetected oscillatory crossing.
    """
    p = dataclasses.replace(params, Nz=Nz)
    basic = solve_basic_state(p)
    ks = np.geomspace(k_range[0], k_range[1], n_k)
    Rn = np.array([neutral_rayleigh(p, basic, k) for k in ks])
    if not np.any(np.isfinite(Rn)):
        raise OnsetError("no neutral Rayleigh number anywhere in the "
                         f"wavenumber window {k_range}; profile may be stable")
    imin = int(np.nanargmin(np.where(np.isfinite(Rn), Rn, np.nan)))
    if imin in (0, n_k - 1):
        raise OnsetError(f"neutral curve minimum sits at the edge of "
                         f"k range {k_range}; widen the window")

    res = optimize.minimize_scalar(
        lambda k: neutral_rayleigh(p, basic, k),
        bracket=(ks[imin - 1], ks[imin], ks[imin + 1]),
        method="brent", options={"xtol": 1e-8})
    k_c = float(res.x)
    R_c, s_crit = _polish_neutral(p, basic, k_c, float(res.fun))

    # a steep equilibrium boundary layer can leave spurious long-wave
    # modes in the discrete spectrum; they betray themselves by growth
    # without forcing, a runaway polish, or no sign change across R_c
    if not (np.isfinite(R_c) and R_c > 0):
        raise OnsetError(f"neutral polish ran away (R_c={R_c!r}); "
                         f"the grid under-resolves the equilibrium, raise Nz")
    if sigma_max(p, basic, k_c, 0.0) >= 0:
        raise OnsetError(f"discrete spectrum unstable at R=0 for k={k_c:.4g}; "
                         f"the grid under-resolves the equilibrium, raise Nz")
    sigma_below = sigma_max(p, basic, k_c, 0.95 * R_c)
    if not (sigma_below < 0 < sigma_max(p, basic, k_c, 1.05 * R_c)):
        raise OnsetError(f"no sign change across R_c={R_c:.6g} at "
                         f"k={k_c:.4g}; onset is not a simple crossing here")

    return NeutralCurveResult(
        R_c=R_c, k_c=k_c, lambda_c=2.0 * np.pi / k_c, Nz=Nz,
        k_samples=ks, R_neutral=Rn,
        sigma_at_crit=s_crit,
        sigma_below=sigma_below,
        params=p, basic=basic)


def seed_fields(params, grid, mode, amplitude, basic=None):
    """FieldSet carrying the equilibrium plus one onset mode.

    psi' = A Psi(z) cos(kx), n' = -A Phi(z) sin(kx); the vorticity is the
    discrete -laplacian of psi' with the same wall closure the stepper
    applies, so a restarted run sees a self-consistent state.
    """
    from .grid_ops import laplacian
    from .solver import FieldSet

    if basic is None:
        basic = solve_basic_state(params)
    z = grid.z
    Psi = np.interp(z, mode.z, mode.Psi)
    Phi = np.interp(z, mode.z, mode.Phi)
    n_s = np.interp(z, basic.z, basic.n_s)

    kx = mode.k * grid.x
    psi = amplitude * np.cos(kx)[:, None] * Psi[None, :]
    n = np.tile(n_s, (grid.Nx, 1)) + amplitude * (-np.sin(kx))[:, None] * Phi[None, :]
    zeta = -laplacian(psi, grid)
    zeta[:, 0] = -2.0 * psi[:, 1] / grid.dz ** 2
    zeta[:, -1] = 0.0
    return FieldSet(psi=psi, zeta=zeta, n=n, t=0.0)


def fit_growth_rate(t, amp):
    """Least-squares slope of log(amp) against t."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(amp, dtype=float)
    keep = a > 0
    return float(np.polyfit(t[keep], np.log(a[keep]), 1)[0])
