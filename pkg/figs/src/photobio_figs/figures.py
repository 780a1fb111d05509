"""Figure rendering: equilibrium profiles and streamline panels.

Contour convention: 21 evenly spaced levels symmetric about psi = 0
(so zero is always a level), plus an emphasized zero-level contour that
delineates roll boundaries.  Rendering is deterministic for a pinned
matplotlib: no timestamps or randomized artists.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .basic_csv import read_basic_csv
from .snapshot_io import read_snapshot

DEFAULT_LEVELS = 21
ZERO_CONTOUR_GID = "zero-contour"


class FigureError(RuntimeError):
    """Inputs cannot be rendered (missing files, mismatched panels)."""


@dataclass(frozen=True)
class FigureSpec:
    """One renderable figure: inputs, layout, contour count, output path."""

    inputs: tuple
    out: Path
    layout: tuple = None   # (rows, cols); None = 2 columns, rows as needed
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "out", Path(self.out))
        if not self.inputs:
            raise FigureError("no input files given")
        for p in self.inputs:
            if not p.exists():
                raise FigureError(f"input does not exist: {p}")
        if self.levels < 3 or self.levels % 2 == 0:
            raise FigureError(
                f"contour count must be odd and >= 3 so zero is a level "
                f"(got {self.levels})")


def plot_basic_state(csv_path, out_path=None, dpi=150):
    """Two-panel equilibrium plot: n_s(z) and I_s(z), sublayer depth marked."""
    prof = read_basic_csv(csv_path)
    fig, (ax_n, ax_i) = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for ax, y, label in ((ax_n, prof.n_s, "cell concentration $n_s$"),
                         (ax_i, prof.I_s, "light intensity $I_s$")):
        ax.plot(prof.z, y, color="tab:blue", lw=1.6)
        if prof.z_c is not None:
            ax.axvline(prof.z_c, color="tab:red", ls="--", lw=1.0)
        ax.set_xlabel("height $z$")
        ax.set_ylabel(label)
        ax.set_xlim(0.0, 1.0)
        ax.grid(True, alpha=0.25)
    if prof.z_c is not None:
        ax_n.annotate(f"$z_c = {prof.z_c:.3f}$",
                      xy=(prof.z_c, float(np.max(prof.n_s))),
                      xytext=(4, -4), textcoords="offset points",
                      color="tab:red", fontsize=9, va="top")
    fig.tight_layout()
    if out_path is not None:
        _save(fig, out_path, dpi)
    return fig


def plot_streamlines(snapshot_paths, out_path=None, layout=None,
                     levels=DEFAULT_LEVELS, dpi=150):
    """Grid of streamline panels, one per snapshot, ordered by R ascending."""
    snaps = [read_snapshot(p) for p in snapshot_paths]
    dims = {(s.Nx, s.Nz) for s in snaps}
    if len(dims) > 1:
        raise FigureError(f"panel grids differ: {sorted(dims)}")

    order = sorted(range(len(snaps)), key=lambda i: (_sort_key(snaps[i]), i))
    n = len(snaps)
    if layout is None:
        cols = min(2, n)
        rows = (n + cols - 1) // cols
    else:
        rows, cols = layout
        if rows * cols < n:
            raise FigureError(
                f"layout {rows}x{cols} cannot hold {n} panels")

    fig, axes = plt.subplots(rows, cols,
                             figsize=(4.6 * cols, 2.9 * rows),
                             squeeze=False)
    for slot, i in enumerate(order):
        _panel(axes[slot // cols][slot % cols], snaps[i], levels)
    for slot in range(n, rows * cols):
        axes[slot // cols][slot % cols].set_axis_off()
    fig.tight_layout()
    if out_path is not None:
        _save(fig, out_path, dpi)
    return fig


def _sort_key(snap):
    if snap.R is not None:
        return (0, snap.R)
    if snap.R_mult is not None:
        return (1, snap.R_mult)
    return (2, 0.0)


def _panel(ax, snap, levels):
    lam = snap.lam if snap.lam is not None else 1.0
    x = np.arange(snap.Nx + 1) * (lam / snap.Nx)  # close the periodic seam
    z = np.linspace(0.0, 1.0, snap.Nz + 1)
    psi = np.vstack([snap.psi, snap.psi[:1]]).T  # (z, x) orientation, wrapped

    vmax = float(np.max(np.abs(psi)))
    if vmax > 0.0:
        lv = np.linspace(-vmax, vmax, levels)
        ax.contourf(x, z, psi, levels=lv, cmap="RdBu_r")
        ax.contour(x, z, psi, levels=lv, colors="k",
                   linewidths=0.35, linestyles="solid")
        zero = ax.contour(x, z, psi, levels=[0.0], colors="k",
                          linewidths=1.1, linestyles="solid")
        zero.set_gid(ZERO_CONTOUR_GID)
    ax.set_title(_panel_title(snap), fontsize=10)
    ax.set_xlim(x[0], x[-1])
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("$x$")
    ax.set_ylabel("$z$")
    ax.set_aspect("equal")


def _panel_title(snap):
    if snap.R_mult is not None:
        return f"$R = {snap.R_mult:g}\\,R_c$"
    if snap.R is not None:
        return f"$R = {snap.R:g}$"
    return "$R$ unrecorded"


def _save(fig, out_path, dpi):
    # strip the backend's software tag so identical inputs give identical bytes
    fig.savefig(out_path, dpi=dpi, metadata={"Software": None})
