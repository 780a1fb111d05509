"""Reader for equilibrium-profile CSVs (columns z, n_s, I_s).

An optional leading comment line "# z_c = <float>" carries the sublayer
depth; files without it plot fine, just without the depth marker.
"""

import re
from dataclasses import dataclass

import numpy as np

REQUIRED = ("z", "n_s", "I_s")

_ZC_RE = re.compile(r"#\s*z_c\s*=\s*([-+0-9.eE]+)")


class BasicCsvError(RuntimeError):
    """Malformed equilibrium CSV; the message names the offending column."""


@dataclass(frozen=True)
class BasicProfile:
    z: np.ndarray
    n_s: np.ndarray
    I_s: np.ndarray
    z_c: float  # None when the file carries no sublayer depth


def read_basic_csv(path):
    z_c = None
    rows = []
    header = None
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _ZC_RE.match(line)
                if m:
                    z_c = float(m.group(1))
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                for col in REQUIRED:
                    if col not in header:
                        raise BasicCsvError(
                            f"{path}: missing column {col!r} "
                            f"(header has {header})")
                idx = [header.index(c) for c in REQUIRED]
                continue
            cells = line.split(",")
            if len(cells) < len(header):
                raise BasicCsvError(
                    f"{path}:{lineno}: row has {len(cells)} cells, "
                    f"header has {len(header)} columns")
            try:
                rows.append([float(cells[i]) for i in idx])
            except ValueError:
                bad = next(c for i, c in zip(idx, REQUIRED)
                           if not _is_float(cells[i]))
                raise BasicCsvError(
                    f"{path}:{lineno}: column {bad!r} is not numeric") from None
    if header is None:
        raise BasicCsvError(f"{path}: no header row (need columns {REQUIRED})")
    if not rows:
        raise BasicCsvError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return BasicProfile(z=data[:, 0], n_s=data[:, 1], I_s=data[:, 2], z_c=z_c)


def _is_float(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False
