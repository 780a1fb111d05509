"""Run orchestration: equilibrium -> onset -> time integration -> artifacts.

Each mode is a plain function taking (params, out_dir) and leaving files
behind; the CLI is a thin shell over these.  Snapshot writing happens on
a dedicated writer thread that receives completed field copies, so the
stepper never waits on the disk.  Everything emitted is deterministic
for a given config and package version -- no wall-clock anywhere in the
numbers -- which is what makes re-run diffs meaningful.
"""

import dataclasses
import json
import os
import queue
import threading
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, linstab
from .basic_state import solve_basic_state
from .grid_ops import Grid
from .params import serialize
from .rolls import count_rolls
from .snapshots import write_snapshot
from .solver import run_to_steady

SWEEP_MULTS = (1.5, 5.0, 10.0, 20.0, 30.0, 40.0, 70.0, 100.0)
ONSET_NZ = 128  # eigenproblem resolution; independent of the run grid

_FMT = "%.17g"  # full float64 round-trip precision in every CSV


class SnapshotWriter:
    """Background writer fed completed snapshot copies through a queue.

    The integration loop stays hot while serialization and disk latency
    happen elsewhere; close() drains the queue and re-raises anything
    the writer hit.
    """

    _STOP = object()

    def __init__(self):
        self._q = queue.Queue(maxsize=8)
        self._error = None
        self._thread = threading.Thread(target=self._drain, daemon=True)
        self._thread.start()

    def _drain(self):
        while True:
            item = self._q.get()
            if item is self._STOP:
                return
            try:
                path, fields, params = item
                write_snapshot(path, fields, params)
            except BaseException as exc:  # surfaced on the caller's side
                self._error = exc

    def put(self, path, fields, params):
        if self._error is not None:
            raise self._error
        self._q.put((path, fields, params))

    def close(self):
        self._q.put(self._STOP)
        self._thread.join()
        if self._error is not None:
            raise self._error


def _write_meta(out_dir, mode, params, artifacts, **extra):
    meta = {"mode": mode, "version": __version__,
            "params": serialize(params),
            "defaulted": params.defaulted_fields(),
            "artifacts": sorted(artifacts)}
    meta.update(extra)
    path = Path(out_dir) / "run_meta.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def resolve_forcing(params, onset_nz=ONSET_NZ):
    """Make R and lambda absolute, solving the onset problem if needed.

    Returns (resolved params, NeutralCurveResult or None).
    """
    if not params.needs_onset:
        return params, None
    cp = linstab.critical_point(params, Nz=onset_nz)
    return params.with_onset(cp.R_c, cp.lambda_c), cp


def write_basic_csv(path, basic):
    with open(path, "w") as f:
        if basic.z_c is not None:
            f.write(f"# z_c = {basic.z_c!r}\n")
        f.write("z,n_s,I_s\n")
        for z, n, I in zip(basic.z, basic.n_s, basic.I_s):
            f.write(f"{z:.17g},{n:.17g},{I:.17g}\n")


def run_basic(params, out_dir):
    """Equilibrium profiles to basic.csv (columns z, n_s, I_s)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    basic = solve_basic_state(params)
    write_basic_csv(out / "basic.csv", basic)
    _write_meta(out, "basic", params, ["basic.csv"],
                z_c=basic.z_c, I_t=params.I_t)
    return basic


def run_onset(params, out_dir, onset_nz=ONSET_NZ):
    """Neutral curve to neutral.csv, critical point to critical.txt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cp = linstab.critical_point(params, Nz=onset_nz)
    cp.to_csv(out / "neutral.csv")
    (out / "critical.txt").write_text(cp.summary_line())
    _write_meta(out, "onset", params, ["neutral.csv", "critical.txt"],
                R_c=cp.R_c, k_c=cp.k_c, lambda_c=cp.lambda_c,
                onset_Nz=cp.Nz)
    return cp


def _write_diagnostics(path, rows):
    header = "t,max_psi,roll_count,mass,residual"
    np.savetxt(path, rows, fmt=_FMT, delimiter=",", header=header, comments="")


def run_simulate(params, out_dir, onset_nz=ONSET_NZ):
    """Integrate to steadiness or t_max; leave snapshots + diagnostics.

    Failing to reach steadiness before t_max is a reportable outcome,
    not an error: the report records steady=False and the final state is
    still written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params, cp = resolve_forcing(params, onset_nz)
    artifacts = ["diagnostics.csv", "final.snap"]
    if cp is not None:
        cp.to_csv(out / "neutral.csv")
        (out / "critical.txt").write_text(cp.summary_line())
        artifacts += ["neutral.csv", "critical.txt"]

    writer = SnapshotWriter()
    counter = {"i": 0}

    def on_snapshot(fields):
        counter["i"] += 1
        name = f"snap_{counter['i']:04d}.snap"
        artifacts.append(name)
        writer.put(out / name, fields, params)

    try:
        fields, report, rows = run_to_steady(params, on_snapshot=on_snapshot)
    finally:
        writer.close()

    write_snapshot(out / "final.snap", fields, params)
    _write_diagnostics(out / "diagnostics.csv", rows)
    rr = count_rolls(fields.psi, Grid.from_params(params))
    meta_kw = dict(steady=report.steady, residual=report.residual,
                   t_reached=report.t_reached, R=params.R, lam=params.lam,
                   primary_rolls=rr.primary_rolls,
                   secondary_cells=rr.secondary_cells,
                   secondary_extent=rr.secondary_extent,
                   max_psi=float(np.max(np.abs(fields.psi))))
    if cp is not None:
        meta_kw.update(R_c=cp.R_c, lambda_c=cp.lambda_c)
    _write_meta(out, "simulate", params, artifacts, **meta_kw)
    return fields, report, rr


def _sweep_job(args):
    params, out_dir = args
    os.makedirs(out_dir, exist_ok=True)
    _, report, rr = run_simulate(params, out_dir)
    return (params.R_mult, params.R, report.steady, report.t_reached,
            report.residual, rr.primary_rolls, rr.secondary_cells,
            rr.secondary_extent)


def _max_workers(n_jobs):
    env = os.environ.get("PHOTOBIO_THREADS", "")
    cap = int(env) if env.strip() else (os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


def run_sweep(params, out_dir, mults=SWEEP_MULTS, onset_nz=ONSET_NZ):
    """One run per Rayleigh multiple, each in its own subdirectory.

    The onset problem is solved once and shared; cases are independent
    and run in parallel up to PHOTOBIO_THREADS workers.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = dataclasses.replace(params, R=None, R_mult=1.0)
    cp = linstab.critical_point(base, Nz=onset_nz)
    cp.to_csv(out / "neutral.csv")
    (out / "critical.txt").write_text(cp.summary_line())

    jobs = []
    for m in mults:
        sub = dataclasses.replace(params, R=None, R_mult=m)
        sub = sub.with_onset(cp.R_c, cp.lambda_c)
        jobs.append((sub, str(out / f"Rx{m:g}")))

    workers = _max_workers(len(jobs))
    if workers == 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))

    header = ("R_mult,R,steady,t_reached,residual,"
              "primary_rolls,secondary_cells,secondary_extent")
    lines = [header]
    for row in results:
        m, R, steady, t, res, rolls, sec, ext = row
        lines.append(f"{m:g},{R:.17g},{int(steady)},{t:.17g},{res:.17g},"
                     f"{rolls},{sec},{ext:.17g}")
    (out / "sweep_summary.csv").write_text("\n".join(lines) + "\n")

    artifacts = (["neutral.csv", "critical.txt", "sweep_summary.csv"]
                 + [f"Rx{m:g}" for m in mults])
    _write_meta(out, "sweep", params, artifacts,
                R_c=cp.R_c, lambda_c=cp.lambda_c,
                mults=list(mults), workers=workers)
    return results
