"""Reference numpy implementations of the per-step hot kernels.

Arrays are (Nx, Nz+1) C-order: first index runs over the periodic x
nodes (no duplicated column), second over z nodes 0..Nz.  The compiled
extension mirrors these signatures exactly; either backend may be
active, so keep semantics bit-for-bit identical where float order of
operations allows.

The flux-divergence kernels implement the conservative centered form:
face values are arithmetic means of the adjacent nodes, wall-normal
advective flux is zeroed on the z = 0, 1 faces, and the two wall rows
are half-height finite-volume cells.  Summing the tendencies against
the trapezoid column weights then telescopes to exactly zero, which is
what keeps total cell mass pinned.
"""

import numpy as np


def optical_depth(n, dz):
    """Column integral of n from each node up to the top wall (trapezoid)."""
    tau = np.empty_like(n)
    face = 0.5 * (n[:, 1:] + n[:, :-1]) * dz
    tau[:, -1] = 0.0
    tau[:, :-1] = np.cumsum(face[:, ::-1], axis=1)[:, ::-1]
    return tau


def n_tendency(n, u, w_total, dx, dz):
    """Explicit cell-transport tendency -div(n*u, n*w_total).

    w_total is the full vertical transport speed (fluid w plus swimming);
    diffusion is not included here (it is advanced implicitly).
    """
    # x-faces, periodic: F[i] sits between node i and i+1
    n_e = 0.5 * (n + np.roll(n, -1, axis=0))
    u_e = 0.5 * (u + np.roll(u, -1, axis=0))
    F = n_e * u_e
    dFdx = (F - np.roll(F, 1, axis=0)) / dx

    # z-faces: G[:, j] sits between node j and j+1; wall faces carry no flux
    n_t = 0.5 * (n[:, 1:] + n[:, :-1])
    w_t = 0.5 * (w_total[:, 1:] + w_total[:, :-1])
    G = n_t * w_t
    dGdz = np.empty_like(n)
    dGdz[:, 1:-1] = (G[:, 1:] - G[:, :-1]) / dz
    # half-height wall cells: only the single interior face contributes
    dGdz[:, 0] = G[:, 0] / (0.5 * dz)
    dGdz[:, -1] = -G[:, -1] / (0.5 * dz)
    return -(dFdx + dGdz)


def zeta_tendency(zeta, u, w, n, ScR, dx, dz):
    """Explicit vorticity tendency -div(zeta*u) - Sc*R*dn/dx, interior rows.

    Wall rows are returned as zeros: z = 0 holds the no-slip closure
    value and z = 1 is stress-free, both reset after each step.
    """
    z_e = 0.5 * (zeta + np.roll(zeta, -1, axis=0))
    u_e = 0.5 * (u + np.roll(u, -1, axis=0))
    F = z_e * u_e
    dFdx = (F - np.roll(F, 1, axis=0)) / dx

    z_t = 0.5 * (zeta[:, 1:] + zeta[:, :-1])
    w_t = 0.5 * (w[:, 1:] + w[:, :-1])
    G = z_t * w_t

    dndx = (np.roll(n, -1, axis=0) - np.roll(n, 1, axis=0)) / (2.0 * dx)

    out = np.zeros_like(zeta)
    out[:, 1:-1] = -(dFdx[:, 1:-1] + (G[:, 1:] - G[:, :-1]) / dz) \
        - ScR * dndx[:, 1:-1]
    return out


def velocity_from_psi(psi, dx, dz):
    """u = dpsi/dz, w = -dpsi/dx; centered, one-sided second order at walls."""
    u = np.empty_like(psi)
    u[:, 1:-1] = (psi[:, 2:] - psi[:, :-2]) / (2.0 * dz)
    u[:, 0] = (-3.0 * psi[:, 0] + 4.0 * psi[:, 1] - psi[:, 2]) / (2.0 * dz)
    u[:, -1] = (3.0 * psi[:, -1] - 4.0 * psi[:, -2] + psi[:, -3]) / (2.0 * dz)
    w = (np.roll(psi, 1, axis=0) - np.roll(psi, -1, axis=0)) / (2.0 * dx)
    return u, w


def tridiag_solve(dl, d, du, rhs):
    """Thomas solve of M independent tridiagonal systems of size K.

    dl, d, du: real (M, K) bands (dl[:,0] and du[:,-1] ignored);
    rhs: (M, K), real or complex.  Returns an array shaped like rhs.
    No pivoting: every caller passes diagonally dominant systems.
    """
    M, K = d.shape
    x = np.array(rhs, dtype=np.complex128 if np.iscomplexobj(rhs) else np.float64)
    cp = np.empty((M, K))
    denom = d[:, 0].copy()
    x[:, 0] = x[:, 0] / denom
    for j in range(1, K):
        cp[:, j - 1] = du[:, j - 1] / denom
        denom = d[:, j] - dl[:, j] * cp[:, j - 1]
        x[:, j] = (x[:, j] - dl[:, j] * x[:, j - 1]) / denom
    for j in range(K - 2, -1, -1):
        x[:, j] -= cp[:, j] * x[:, j + 1]
    return x
