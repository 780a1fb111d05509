"""Counting convection cells in a stream-function field.

Primary rolls are counted along the mid-depth line z = 1/2: each sign
change of psi going once around the periodic x direction is one cell
boundary, so the number of sign changes equals the number of rolls (and
is even by periodicity).  Values within a tiny fraction of the global
peak are treated as zero so a quiescent field counts as zero rolls.

Secondary cells are the counter-rotating pockets that appear near the
top wall inside a primary roll at higher forcing.  They are detected as
connected regions of significant |psi| (periodic connectivity in x)
that live entirely above z = 0.6 and whose circulation sign is opposite
to the primary roll directly beneath them.
"""

import numpy as np
from dataclasses import dataclass
from scipy import ndimage

SIGN_EPS = 1e-9       # fraction of peak |psi| treated as zero on the midline
CELL_EPS = 1e-3       # fraction of peak |psi| a secondary pocket must reach
TOP_BAND = 0.6        # secondary pockets must sit entirely above this height


@dataclass(frozen=True)
class RollCount:
    primary_rolls: int
    secondary_cells: int
    secondary_extent: float   # largest vertical span among secondary cells


def _cyclic_sign_changes(values, threshold):
    signs = [1 if v > threshold else -1 for v in values if abs(v) > threshold]
    if not signs:
        return 0
    return sum(1 for a, b in zip(signs, signs[1:] + signs[:1]) if a != b)


def _periodic_components(mask):
    """Connected components of mask with x wrapped; list of index tuples."""
    lab, nlab = ndimage.label(mask)
    if nlab == 0:
        return []
    parent = list(range(nlab + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j in range(mask.shape[1]):
        a, b = lab[0, j], lab[-1, j]
        if a and b:
            parent[find(a)] = find(b)

    groups = {}
    for lbl in range(1, nlab + 1):
        groups.setdefault(find(lbl), []).append(lbl)
    out = []
    for members in groups.values():
        sel = np.isin(lab, members)
        out.append(np.nonzero(sel))
    return out


def count_rolls(psi, grid):
    peak = np.max(np.abs(psi))
    if peak == 0.0 or not np.isfinite(peak):
        return RollCount(0, 0, 0.0)

    mid = grid.Nz // 2
    primary = _cyclic_sign_changes(psi[:, mid], SIGN_EPS * peak)

    thr = CELL_EPS * peak
    secondary = 0
    extent = 0.0
    for sign in (1.0, -1.0):
        for ii, jj in _periodic_components(sign * psi > thr):
            z_lo = jj.min() * grid.dz
            if z_lo <= TOP_BAND:
                continue
            # compare against the primary circulation straight below
            col = ii[np.argmax(np.abs(psi[ii, jj]))]
            beneath = psi[col, mid]
            if beneath * sign < -thr:
                secondary += 1
                extent = max(extent, (jj.max() - jj.min()) * grid.dz)
    return RollCount(primary, secondary, extent)
