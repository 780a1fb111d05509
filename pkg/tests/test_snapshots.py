import dataclasses

import numpy as np
import pytest

from photobio.params import load_config
from photobio.snapshots import (SnapshotError, params_digest, read_snapshot,
                                write_snapshot)
from photobio.solver import FieldSet


def make_params(**over):
    base = {"Vc": 10.0, "kappa": 0.5, "I_c": 0.66, "R": 500.0,
            "lambda": 2.0, "Nx": 32, "Nz": 16}
    base.update(over)
    text = "\n".join(f"{k} = {v}" for k, v in base.items() if v is not None)
    return load_config(text)


def random_fields(p, seed=0):
    rng = np.random.default_rng(seed)
    shape = (p.Nx, p.Nz + 1)
    return FieldSet(psi=rng.standard_normal(shape),
                    zeta=rng.standard_normal(shape),
                    n=rng.standard_normal(shape), t=1.375)


def test_round_trip_is_bit_identical(tmp_path):
    p = make_params()
    f = random_fields(p)
    path = tmp_path / "state.snap"
    write_snapshot(path, f, p)
    s = read_snapshot(path)
    for name in ("psi", "zeta", "n"):
        assert getattr(s, name).tobytes() == getattr(f, name).tobytes()
    assert s.t == 1.375
    assert s.R == 500.0 and s.lam == 2.0 and s.R_mult is None
    assert s.Nx == p.Nx and s.Nz == p.Nz
    assert s.matches(p)


def test_rewrite_same_state_same_bytes(tmp_path):
    p = make_params()
    f = random_fields(p, seed=3)
    a, b = tmp_path / "a.snap", tmp_path / "b.snap"
    write_snapshot(a, f, p)
    write_snapshot(b, f, p)
    assert a.read_bytes() == b.read_bytes()


def test_digest_distinguishes_configs(tmp_path):
    p = make_params()
    q = make_params(Vc=12.0)
    assert params_digest(p) != params_digest(q)
    path = tmp_path / "state.snap"
    write_snapshot(path, random_fields(p), p)
    assert read_snapshot(path, expect_params=p).matches(p)
    with pytest.raises(SnapshotError, match="digest"):
        read_snapshot(path, expect_params=q)


def test_relative_forcing_round_trips_as_none(tmp_path):
    p = make_params(R=None, R_mult=5.0)
    path = tmp_path / "state.snap"
    write_snapshot(path, random_fields(p), p)
    s = read_snapshot(path)
    assert s.R is None and s.R_mult == 5.0


def test_rejects_foreign_and_damaged_files(tmp_path):
    p = make_params()
    path = tmp_path / "state.snap"
    write_snapshot(path, random_fields(p), p)
    raw = path.read_bytes()

    bad_magic = tmp_path / "magic.snap"
    bad_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(SnapshotError, match="magic"):
        read_snapshot(bad_magic)

    truncated = tmp_path / "short.snap"
    truncated.write_bytes(raw[:-8])
    with pytest.raises(SnapshotError, match="payload"):
        read_snapshot(truncated)

    stub = tmp_path / "stub.snap"
    stub.write_bytes(raw[:10])
    with pytest.raises(SnapshotError, match="truncated"):
        read_snapshot(stub)

    future = tmp_path / "future.snap"
    future.write_bytes(raw[:4] + (99).to_bytes(2, "little") + raw[6:])
    with pytest.raises(SnapshotError, match="version"):
        read_snapshot(future)


def test_shape_mismatch_refused_on_write(tmp_path):
    p = make_params()
    f = random_fields(p)
    wrong = dataclasses.replace(f, psi=f.psi[:, :-1])
    with pytest.raises(SnapshotError, match="shape"):
        write_snapshot(tmp_path / "bad.snap", wrong, p)
