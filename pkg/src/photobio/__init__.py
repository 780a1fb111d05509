"""Two-dimensional phototactic bioconvection in an algal suspension.

Subpackages cover the equilibrium (no-flow) state, linear onset of the
overturning instability, and the nonlinear stream-function/vorticity
solver with its roll-pattern diagnostics and snapshot I/O.
"""

__version__ = "0.1.0"
