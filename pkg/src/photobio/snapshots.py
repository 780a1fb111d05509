"""Binary field snapshots: fixed 64-byte header + raw float64 payload.

The format is built for restartability and bit-exact comparison, not
human readability (diagnostics go to CSV for that).  The header pins
the grid shape, time, forcing, and an 8-byte digest of the canonical
parameter serialization so a reader can refuse fields produced under a
different configuration.  Payload arrays are written row-major
little-endian, so write-then-read is bit-identical on any host numpy
supports.
"""

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .params import serialize

MAGIC = b"PBSN"
VERSION = 1
_HEADER = struct.Struct("<4sHHIIdddd8sII")
HEADER_SIZE = _HEADER.size
assert HEADER_SIZE == 64

_ARRAYS = 3  # psi, zeta, n


class SnapshotError(RuntimeError):
    """Unreadable, truncated, or mismatched snapshot file."""


def params_digest(params):
    """First 8 bytes of the sha256 of the canonical config text."""
    return hashlib.sha256(serialize(params).encode()).digest()[:8]


@dataclass(frozen=True)
class Snapshot:
    """One saved field state; shapes are (Nx, Nz+1) C-order float64."""

    psi: np.ndarray
    zeta: np.ndarray
    n: np.ndarray
    t: float
    R: float        # None if written before the forcing was resolved
    R_mult: float   # None when the run was configured with absolute R
    lam: float
    Nx: int
    Nz: int
    digest: bytes
    version: int = VERSION

    def matches(self, params):
        """True when this snapshot was produced under exactly these parameters."""
        return self.digest == params_digest(params)


def _as_payload(a, Nx, Nz, name):
    a = np.asarray(a, dtype="<f8")
    if a.shape != (Nx, Nz + 1):
        raise SnapshotError(
            f"{name} has shape {a.shape}, header says ({Nx}, {Nz + 1})")
    return np.ascontiguousarray(a)


def write_snapshot(path, fields, params, t=None):
    """Persist one FieldSet under the given parameters.

    t defaults to fields.t; passing it explicitly lets a caller stamp a
    snapshot taken mid-step.
    """
    Nx, Nz = params.Nx, params.Nz
    t = fields.t if t is None else t
    nan = float("nan")
    header = _HEADER.pack(
        MAGIC, VERSION, 0, Nx, Nz,
        float(t),
        nan if params.R is None else float(params.R),
        nan if params.R_mult is None else float(params.R_mult),
        nan if params.lam is None else float(params.lam),
        params_digest(params), _ARRAYS, 0)
    with open(path, "wb") as f:
        f.write(header)
        for name in ("psi", "zeta", "n"):
            f.write(_as_payload(getattr(fields, name), Nx, Nz, name).tobytes())


def read_snapshot(path, expect_params=None):
    """Load a snapshot, validating format, size, and (optionally) provenance.

    With expect_params given, a digest mismatch is an error: the file
    was written under a different configuration and must not silently
    seed a restart.
    """
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < HEADER_SIZE:
        raise SnapshotError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, _flags, Nx, Nz, t, R, R_mult, lam, digest, narrays, _ = \
        _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"{path}: not a snapshot file (magic {magic!r})")
    if version != VERSION:
        raise SnapshotError(
            f"{path}: format version {version}, this reader handles {VERSION}")
    if narrays != _ARRAYS:
        raise SnapshotError(f"{path}: {narrays} arrays, expected {_ARRAYS}")
    per = Nx * (Nz + 1) * 8
    want = HEADER_SIZE + _ARRAYS * per
    if len(raw) != want:
        raise SnapshotError(
            f"{path}: payload is {len(raw) - HEADER_SIZE} bytes, "
            f"header dims ({Nx}, {Nz + 1}) require {want - HEADER_SIZE}")
    if expect_params is not None and digest != params_digest(expect_params):
        raise SnapshotError(
            f"{path}: parameter digest mismatch; refusing to mix runs")

    arrays = []
    for i in range(_ARRAYS):
        off = HEADER_SIZE + i * per
        a = np.frombuffer(raw, dtype="<f8", count=Nx * (Nz + 1), offset=off)
        arrays.append(a.reshape(Nx, Nz + 1).copy())

    def opt(x):
        return None if np.isnan(x) else x

    return Snapshot(psi=arrays[0], zeta=arrays[1], n=arrays[2],
                    t=t, R=opt(R), R_mult=opt(R_mult), lam=opt(lam),
                    Nx=Nx, Nz=Nz, digest=digest, version=version)
