"""Command line: render one figure from solver artifacts.

    python -m photobio_figs basic --in basic.csv --out fig.png
    python -m photobio_figs streamlines --in a.snap b.snap --out grid.png
"""

import argparse
import sys

from .figures import DEFAULT_LEVELS, FigureError, FigureSpec, \
    plot_basic_state, plot_streamlines

MODES = ("basic", "streamlines")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="photobio_figs",
        description="Render equilibrium-profile or streamline figures "
                    "from solver output files.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--in", dest="inputs", nargs="+", required=True,
                    metavar="PATH",
                    help="input artifact(s): one CSV for basic, one or "
                         "more snapshots for streamlines")
    ap.add_argument("--out", required=True, metavar="FILE.png",
                    help="output image path")
    ap.add_argument("--layout", default=None, metavar="RxC",
                    help="panel grid, e.g. 2x2 (streamlines only)")
    ap.add_argument("--levels", type=int, default=DEFAULT_LEVELS,
                    help="number of contour levels (odd, zero included)")
    ap.add_argument("--dpi", type=int, default=150)
    return ap


def _parse_layout(text):
    try:
        rows, cols = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise SystemExit(f"--layout must look like 2x2, got {text!r}")
    return rows, cols


def main(argv=None):
    args = build_parser().parse_args(argv)
    layout = _parse_layout(args.layout) if args.layout else None
    try:
        spec = FigureSpec(inputs=tuple(args.inputs), out=args.out,
                          layout=layout, levels=args.levels)
        if args.mode == "basic":
            if len(spec.inputs) != 1:
                raise FigureError(
                    f"basic mode takes exactly one CSV, got {len(spec.inputs)}")
            plot_basic_state(spec.inputs[0], spec.out, dpi=args.dpi)
        else:
            plot_streamlines(spec.inputs, spec.out, layout=spec.layout,
                             levels=spec.levels, dpi=args.dpi)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
