"""Hot-kernel timings: compiled extension vs numpy reference.

Usage: python3 benchmarks/bench_kernels.py [Nx Nz [repeats]]

Times each per-step kernel on both backends at a production-like grid
and reports the speedup, then times whole solver steps under whichever
backend is active (set PHOTOBIO_FORCE_PY=1 to time the fallback).
"""

import sys
import time

import numpy as np

from photobio import _kernels_py, kernels
from photobio.params import load_config
from photobio.solver import Stepper

try:
    from photobio import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv):
    Nx = int(argv[1]) if len(argv) > 1 else 256
    Nz = int(argv[2]) if len(argv) > 2 else 128
    repeats = int(argv[3]) if len(argv) > 3 else 30
    rng = np.random.default_rng(0)
    shape = (Nx, Nz + 1)
    n = rng.uniform(0.5, 2.0, shape)
    u, w, zeta, psi = (rng.standard_normal(shape) for _ in range(4))
    dx, dz = 0.01, 1.0 / Nz
    M, K = Nx // 2 + 1, Nz + 1
    dl = rng.uniform(-1, 1, (M, K))
    du = rng.uniform(-1, 1, (M, K))
    d = 4.0 + rng.uniform(0, 1, (M, K))
    rhs_c = rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))

    cases = [
        ("optical_depth", lambda b: b.optical_depth(n, dz)),
        ("n_tendency", lambda b: b.n_tendency(n, u, w, dx, dz)),
        ("zeta_tendency", lambda b: b.zeta_tendency(zeta, u, w, n, 100.0, dx, dz)),
        ("velocity_from_psi", lambda b: b.velocity_from_psi(psi, dx, dz)),
        ("tridiag_complex", lambda b: b.tridiag_solve(dl, d, du, rhs_c)),
    ]

    print(f"grid {Nx}x{Nz}, best of {repeats}")
    if _kernels is None:
        print("compiled extension not built; timing the reference only")
    for name, call in cases:
        t_py = best_of(lambda: call(_kernels_py), repeats)
        if _kernels is not None:
            t_c = best_of(lambda: call(_kernels), repeats)
            print(f"{name:18s} numpy {t_py * 1e6:9.1f} us   "
                  f"compiled {t_c * 1e6:9.1f} us   x{t_py / t_c:5.2f}")
        else:
            print(f"{name:18s} numpy {t_py * 1e6:9.1f} us")

    p = load_config(f"Vc = 10\nkappa = 0.5\nI_c = 0.66\nR = 500\n"
                    f"lambda = 2.0\nNx = {Nx}\nNz = {Nz}")
    st = Stepper(p)
    for _ in range(5):  # warm the dt ladder and FFT plans
        st.step()
    t0 = time.perf_counter()
    steps = 50
    for _ in range(steps):
        st.step()
    per = (time.perf_counter() - t0) / steps
    print(f"full step ({kernels.BACKEND:8s}) {per * 1e3:8.2f} ms")


if __name__ == "__main__":
    main(sys.argv)
