"""Standalone reader for the solver's versioned binary snapshot format.

This package consumes solver output strictly through its published file
formats, so the layout is decoded here from the format contract rather
than imported from the producing library:

  64-byte little-endian header, struct layout "<4sHHIIdddd8sII":
    magic    4s  b"PBSN"
    version  H   1
    flags    H   reserved
    Nx       I   grid columns
    Nz       I   grid intervals in z (arrays carry Nz + 1 rows)
    t        d   simulation time
    R        d   Rayleigh number (NaN when not recorded)
    R_mult   d   forcing as a multiple of critical (NaN when absolute)
    lam      d   domain wavelength (NaN when not recorded)
    digest   8s  producing run's parameter digest
    narrays  I   3
    reserved I

  Payload: psi, zeta, n in order, each (Nx, Nz + 1) row-major float64.
"""

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"PBSN"
VERSION = 1
HEADER = struct.Struct("<4sHHIIdddd8sII")
N_ARRAYS = 3


class SnapshotFormatError(RuntimeError):
    """File is not a readable snapshot of the supported version."""


@dataclass(frozen=True)
class FieldSnapshot:
    """Decoded snapshot; arrays have shape (Nx, Nz + 1)."""

    psi: np.ndarray
    zeta: np.ndarray
    n: np.ndarray
    t: float
    R: float        # None when the file does not record it
    R_mult: float   # None when the run used an absolute Rayleigh number
    lam: float      # None when the file does not record it
    Nx: int
    Nz: int


def read_snapshot(path):
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, _flags, Nx, Nz, t, R, R_mult, lam, _digest, narrays, _ = \
        HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: not a snapshot file (magic {magic!r})")
    if version != VERSION:
        raise SnapshotFormatError(
            f"{path}: format version {version}, this reader handles {VERSION}")
    if narrays != N_ARRAYS:
        raise SnapshotFormatError(f"{path}: {narrays} arrays, expected {N_ARRAYS}")
    per = Nx * (Nz + 1) * 8
    want = HEADER.size + N_ARRAYS * per
    if len(raw) != want:
        raise SnapshotFormatError(
            f"{path}: payload is {len(raw) - HEADER.size} bytes, "
            f"header dims ({Nx}, {Nz + 1}) require {want - HEADER.size}")

    def field(i):
        a = np.frombuffer(raw, dtype="<f8", count=Nx * (Nz + 1),
                          offset=HEADER.size + i * per)
        return a.reshape(Nx, Nz + 1).copy()

    def opt(x):
        return None if np.isnan(x) else float(x)

    return FieldSnapshot(psi=field(0), zeta=field(1), n=field(2),
                         t=float(t), R=opt(R), R_mult=opt(R_mult),
                         lam=opt(lam), Nx=int(Nx), Nz=int(Nz))
