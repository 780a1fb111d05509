"""Figures from bioconvection solver artifacts (snapshots and CSVs)."""

from .basic_csv import BasicCsvError, BasicProfile, read_basic_csv
from .figures import (DEFAULT_LEVELS, ZERO_CONTOUR_GID, FigureError,
                      FigureSpec, plot_basic_state, plot_streamlines)
from .snapshot_io import (FieldSnapshot, SnapshotFormatError, read_snapshot)

__version__ = "0.1.0"

__all__ = [
    "BasicCsvError", "BasicProfile", "read_basic_csv",
    "DEFAULT_LEVELS", "ZERO_CONTOUR_GID", "FigureError", "FigureSpec",
    "plot_basic_state", "plot_streamlines",
    "FieldSnapshot", "SnapshotFormatError", "read_snapshot",
    "__version__",
]
