"""Uniform collocated grid and the stream-function Poisson solver.

The domain is one periodic wavelength wide (x in [0, lambda), no
duplicated column) and one layer deep (z in [0, 1], Nz+1 nodes).  The
Poisson problem zeta = -lap(psi) with psi = 0 on both walls separates
under a discrete Fourier transform in x into Nx independent
tridiagonal systems in z, solved directly: no iteration, no tolerance.

The Fourier symbol used is the DISCRETE one of the 5-point Laplacian,
khat2 = (2 - 2 cos(2 pi m / Nx)) / dx^2, so the solve inverts exactly
the same stencil the rest of the code differences with.
"""

import numpy as np
from dataclasses import dataclass

from . import kernels


@dataclass(frozen=True)
class Grid:
    Nx: int
    Nz: int
    lam: float

    def __post_init__(self):
        if self.Nx < 8 or self.Nz < 8:
            raise ValueError(f"grid too coarse: {self.Nx} x {self.Nz}")
        if self.lam <= 0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")

    @property
    def dx(self):
        return self.lam / self.Nx

    @property
    def dz(self):
        return 1.0 / self.Nz

    @property
    def x(self):
        return np.arange(self.Nx) * self.dx

    @property
    def z(self):
        return np.linspace(0.0, 1.0, self.Nz + 1)

    @property
    def shape(self):
        return (self.Nx, self.Nz + 1)

    @classmethod
    def from_params(cls, p):
        return cls(Nx=p.Nx, Nz=p.Nz, lam=p.lam)


def fourier_symbols(grid):
    """Discrete -d2/dx2 eigenvalues of the rfft modes."""
    m = np.arange(grid.Nx // 2 + 1)
    return (2.0 - 2.0 * np.cos(2.0 * np.pi * m / grid.Nx)) / grid.dx ** 2


def poisson_solve(zeta, grid):
    """Solve lap(psi) = -zeta with psi(z=0) = psi(z=1) = 0, periodic in x."""
    dz2 = grid.dz ** 2
    khat2 = fourier_symbols(grid)
    M, K = khat2.size, grid.Nz - 1

    rhs = np.ascontiguousarray(np.fft.rfft(zeta[:, 1:-1], axis=0))
    d = np.broadcast_to((2.0 / dz2 + khat2)[:, None], (M, K)).copy()
    off = np.full((M, K), -1.0 / dz2)
    sol = kernels.tridiag_solve(off, d, off, rhs)
    psi = np.zeros_like(zeta)
    psi[:, 1:-1] = np.fft.irfft(sol, n=grid.Nx, axis=0)
    return psi


def velocity_from_psi(psi, grid):
    """u = dpsi/dz, w = -dpsi/dx (centered; one-sided second order at walls)."""
    return kernels.velocity_from_psi(psi, grid.dx, grid.dz)


def laplacian(f, grid):
    """5-point Laplacian, periodic in x; wall rows returned as zeros."""
    out = np.zeros_like(f)
    fxx = (np.roll(f, -1, axis=0) - 2.0 * f + np.roll(f, 1, axis=0)) / grid.dx ** 2
    out[:, 1:-1] = fxx[:, 1:-1] + (f[:, 2:] - 2.0 * f[:, 1:-1] + f[:, :-2]) / grid.dz ** 2
    return out
