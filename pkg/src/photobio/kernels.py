"""Backend selection for the hot per-step kernels.

Prefers the compiled extension when it imports; falls back to the
numpy reference implementations otherwise.  PHOTOBIO_FORCE_PY=1 forces
the fallback (useful for benchmarking and for debugging the extension).
Both backends share one test suite; BACKEND names the active one.
"""

import os

from . import _kernels_py

if os.environ.get("PHOTOBIO_FORCE_PY"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

optical_depth = _impl.optical_depth
n_tendency = _impl.n_tendency
zeta_tendency = _impl.zeta_tendency
velocity_from_psi = _impl.velocity_from_psi
tridiag_solve = _impl.tridiag_solve
