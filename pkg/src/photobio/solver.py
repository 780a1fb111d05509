"""Semi-implicit time stepper for the vorticity/cell-transport system.

Unknowns live on the collocated periodic-x grid: stream function psi,
vorticity zeta = -lap(psi), and cell concentration n.  One step is

  1. light field from the current n, swimming speed Vc M(I),
  2. explicit tendencies: conservative advection of n (fluid velocity
     plus vertical swimming) and of zeta, plus the buoyancy torque
     -Sc R dn/dx, combined with variable-step second-order
     Adams-Bashforth weights,
  3. Crank-Nicolson for both diffusion operators, decoupled into
     tridiagonal z-solves per Fourier mode in x,
  4. Poisson solve for psi, then boundary closure: no-slip wall
     vorticity at z = 0 (Thom), zeta = 0 at the stress-free top.

The cell equation is advanced on all Nz+1 rows with half-height
finite-volume wall cells and zero wall-normal flux, which makes total
cell mass a discrete invariant of the full scheme (explicit part
telescopes; the implicit wall rows annihilate the trapezoid weights).

The no-slip closure must be treated implicitly: lagging the wall
vorticity one step puts a gain of order Sc dt / dz^2 around the
wall/psi feedback loop and the scheme sawtooths to pieces.  Writing
zeta_0^{new} = -(2/dz^2) psi_1^{new} with psi^{new} = P^{-1} zeta^{new}
makes the wall term a rank-one coupling e_1 g^T per Fourier mode
(g = first column of the symmetric Poisson inverse), so the implicit
solve is the plain tridiagonal one plus a Sherman-Morrison correction
with a precomputed vector.

Time-step control: dt <= 0.4 min(dx/|u|max, dz/(|w|max + 0.9 Vc)),
quantized to the ladder dt_config / 2^m so the AB2 ratio stays mostly
at one and the implicit bands are rebuilt rarely.
"""

import numpy as np
from dataclasses import dataclass

from . import kernels
from .grid_ops import Grid, fourier_symbols, laplacian, poisson_solve, velocity_from_psi

CFL = 0.4
MAX_SWIM = 0.9          # |M| never exceeds it
BLOWUP_LIMIT = 1e8


class BlowupError(RuntimeError):
    """Non-finite or runaway fields; carries the time it happened."""

    def __init__(self, t, step, what):
        super().__init__(f"solution blew up at t={t:.6g} (step {step}): {what}")
        self.t = t
        self.step = step


@dataclass
class FieldSet:
    """psi, zeta, n on the grid at one time level."""
    psi: np.ndarray
    zeta: np.ndarray
    n: np.ndarray
    t: float

    def copy(self):
        return FieldSet(self.psi.copy(), self.zeta.copy(), self.n.copy(), self.t)


@dataclass(frozen=True)
class SteadyReport:
    steady: bool
    residual: float
    t_reached: float


def initial_condition(params, grid):
    """Quiescent start with the standing concentration perturbation."""
    x = grid.x
    n = np.tile(1.0 + params.epsilon * np.cos(np.pi * x / grid.lam)[:, None],
                (1, grid.Nz + 1))
    zero = np.zeros(grid.shape)
    return FieldSet(psi=zero.copy(), zeta=zero.copy(), n=n, t=0.0)


def _fv_laplacian(f, grid):
    """Periodic-x Laplacian with finite-volume no-flux wall rows in z."""
    dz2 = grid.dz ** 2
    out = (np.roll(f, -1, axis=0) - 2.0 * f + np.roll(f, 1, axis=0)) / grid.dx ** 2
    out[:, 1:-1] += (f[:, 2:] - 2.0 * f[:, 1:-1] + f[:, :-2]) / dz2
    out[:, 0] += 2.0 * (f[:, 1] - f[:, 0]) / dz2
    out[:, -1] += 2.0 * (f[:, -2] - f[:, -1]) / dz2
    return out


class Stepper:
    """Owns one mutable FieldSet and advances it in place."""

    def __init__(self, params, grid=None, response=None, init=None):
        if params.needs_onset:
            raise ValueError("params still carry R_mult / critical lambda; "
                             "resolve against the onset point first")
        self.p = params
        self.grid = grid if grid is not None else Grid.from_params(params)
        self.resp = response if response is not None else params.photoresponse()
        self.state = init.copy() if init is not None else initial_condition(params, self.grid)
        self.u, self.w = velocity_from_psi(self.state.psi, self.grid)
        self.khat2 = fourier_symbols(self.grid)
        self.step_count = 0
        self._Fn_prev = None
        self._Fz_prev = None
        self._dt_prev = None
        self._bands = {}
        self._m_level = 0
        # first column of the per-mode Poisson inverse: psi_1 = g . zeta
        M, Kz = self.khat2.size, self.grid.Nz - 1
        dz2 = self.grid.dz ** 2
        p_d = 2.0 / dz2 + np.repeat(self.khat2[:, None], Kz, axis=1)
        p_off = np.full((M, Kz), -1.0 / dz2)
        e1 = np.zeros((M, Kz))
        e1[:, 0] = 1.0
        self._g_wall = kernels.tridiag_solve(p_off, p_d, p_off, e1)

    # -- implicit machinery -------------------------------------------------

    def _bands_for(self, dt):
        """New-side CN band triples for the n and zeta solves at this dt."""
        if dt in self._bands:
            return self._bands[dt]
        M = self.khat2.size
        dz2 = self.grid.dz ** 2
        Nz = self.grid.Nz

        # cell field: K = Nz+1 rows, finite-volume wall rows
        K = Nz + 1
        d = 1.0 + 0.5 * dt * self.khat2[:, None] + (dt / dz2) * np.ones((M, K))
        lo = np.full((M, K), -0.5 * dt / dz2)
        up = np.full((M, K), -0.5 * dt / dz2)
        up[:, 0] = -dt / dz2
        lo[:, -1] = -dt / dz2
        n_bands = (lo, d, up)

        # vorticity: interior rows, Dirichlet top, implicit no-slip bottom
        # handled as a rank-one update (see module docstring)
        Sc = self.p.Sc
        Kz = Nz - 1
        dz_ = 1.0 + 0.5 * Sc * dt * self.khat2[:, None] + (Sc * dt / dz2) * np.ones((M, Kz))
        offz = np.full((M, Kz), -0.5 * Sc * dt / dz2)
        e1 = np.zeros((M, Kz))
        e1[:, 0] = 1.0
        q = kernels.tridiag_solve(offz, dz_, offz, e1)
        beta = -Sc * dt / dz2 ** 2
        denom = 1.0 - beta * np.sum(self._g_wall * q, axis=1)
        z_bands = (offz, dz_, offz, q, beta, denom)

        self._bands[dt] = (n_bands, z_bands)
        return self._bands[dt]

    def _pick_dt(self):
        """CFL-limited dt on the power-of-two ladder under the config dt."""
        g, p = self.grid, self.p
        umax = np.max(np.abs(self.u))
        wmax = np.max(np.abs(self.w)) + MAX_SWIM * p.Vc
        limit = CFL * min(g.dx / max(umax, 1e-300), g.dz / max(wmax, 1e-300))
        m = 0 if limit >= p.dt else int(np.ceil(np.log2(p.dt / limit)))
        # only relax the level with 25% headroom so it does not chatter
        if m < self._m_level and limit < 1.25 * p.dt / 2 ** (self._m_level - 1):
            m = self._m_level
        self._m_level = m
        return p.dt / 2 ** m

    # -- one time level ------------------------------------------------------

    def step(self):
        g, p, s = self.grid, self.p, self.state
        dt = self._pick_dt()

        I = self.resp.M(p.I_t * np.exp(-p.kappa * kernels.optical_depth(
            np.maximum(s.n, 0.0), g.dz)))
        w_tot = self.w + p.Vc * I
        Fn = kernels.n_tendency(s.n, self.u, w_tot, g.dx, g.dz)
        Fz = kernels.zeta_tendency(s.zeta, self.u, self.w, s.n,
                                   p.Sc * p.R, g.dx, g.dz)

        if self._Fn_prev is None:
            ab_n, ab_z = Fn, Fz
        else:
            r = dt / self._dt_prev
            ab_n = (1.0 + 0.5 * r) * Fn - 0.5 * r * self._Fn_prev
            ab_z = (1.0 + 0.5 * r) * Fz - 0.5 * r * self._Fz_prev

        (n_lo, n_d, n_up), (z_off, z_d, _, q, beta, denom) = self._bands_for(dt)

        rhs_n = s.n + dt * ab_n + 0.5 * dt * _fv_laplacian(s.n, g)
        nhat = np.ascontiguousarray(np.fft.rfft(rhs_n, axis=0))
        n_new = np.fft.irfft(kernels.tridiag_solve(n_lo, n_d, n_up, nhat),
                             n=g.Nx, axis=0)

        rhs_z = s.zeta + dt * ab_z + 0.5 * p.Sc * dt * laplacian(s.zeta, g)
        zhat = np.ascontiguousarray(np.fft.rfft(rhs_z[:, 1:-1], axis=0))
        y = kernels.tridiag_solve(z_off, z_d, z_off, zhat)
        # implicit wall vorticity: rank-one Sherman-Morrison correction
        wall = beta * np.sum(self._g_wall * y, axis=1) / denom
        z_int = np.fft.irfft(y + wall[:, None] * q, n=g.Nx, axis=0)

        zeta_new = np.zeros_like(s.zeta)
        zeta_new[:, 1:-1] = z_int
        psi_new = poisson_solve(zeta_new, g)
        zeta_new[:, 0] = -2.0 * psi_new[:, 1] / g.dz ** 2
        zeta_new[:, -1] = 0.0

        s.n = n_new
        s.zeta = zeta_new
        s.psi = psi_new
        s.t += dt
        self.u, self.w = velocity_from_psi(psi_new, g)
        self._Fn_prev, self._Fz_prev, self._dt_prev = Fn, Fz, dt
        self.step_count += 1

        peak = max(np.max(np.abs(psi_new)), np.max(np.abs(n_new)))
        if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
            raise BlowupError(s.t, self.step_count, f"max field magnitude {peak:.3g}")
        return dt

    def mass(self):
        wgt = np.ones(self.grid.Nz + 1)
        wgt[0] = wgt[-1] = 0.5
        return float(np.sum(self.state.n @ wgt) * self.grid.dx * self.grid.dz)


def run_to_steady(params, init=None, response=None, on_sample=None,
                  on_snapshot=None):
    """March to steadiness or t_max; returns (fields, report, diagnostics).

    Diagnostics is a float array with one row per sample:
    t, max|psi|, primary roll count, total mass, residual.  The residual
    is the max-norm change of {psi, n} per unit time across the sampling
    window.  on_sample(row) and on_snapshot(fieldset) are optional hooks.
    """
    from .rolls import count_rolls

    stepper = Stepper(params, init=init, response=response)
    s = stepper.state
    prev_psi, prev_n, prev_t = s.psi.copy(), s.n.copy(), s.t
    next_sample = s.t + params.sample_interval
    next_snap = s.t + params.snapshot_interval if params.snapshot_interval > 0 else np.inf
    rows = []
    residual = np.inf
    steady = False

    while s.t < params.t_max - 1e-12:
        stepper.step()
        if s.t + 1e-12 >= next_snap:
            if on_snapshot is not None:
                on_snapshot(s.copy())
            next_snap += params.snapshot_interval
        if s.t + 1e-12 < next_sample:
            continue
        window = s.t - prev_t
        residual = max(np.max(np.abs(s.psi - prev_psi)),
                       np.max(np.abs(s.n - prev_n))) / window
        row = (s.t, float(np.max(np.abs(s.psi))),
               float(count_rolls(s.psi, stepper.grid).primary_rolls),
               stepper.mass(), residual)
        rows.append(row)
        if on_sample is not None:
            on_sample(row)
        if residual < params.steady_tol:
            steady = True
            break
        prev_psi, prev_n, prev_t = s.psi.copy(), s.n.copy(), s.t
        next_sample = s.t + params.sample_interval

    report = SteadyReport(steady=steady, residual=float(residual), t_reached=s.t)
    return s, report, np.array(rows) if rows else np.empty((0, 5))
