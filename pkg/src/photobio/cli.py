"""Command-line front end: photobio <mode> --config FILE [options].

Modes map one-to-one onto pipeline functions.  Any failure inside the
library lands in <out>/error.json as a machine-readable record and the
process exits nonzero; a run that merely fails to reach steadiness is a
reported outcome, not a failure.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import pipeline
from .params import ConfigError, load_config

MODES = ("basic", "onset", "simulate", "sweep")


def _parse_overrides(items):
    overrides = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ConfigError(f"override must look like key=value (got {item!r})")
        overrides[key] = val
    return overrides


def build_parser():
    ap = argparse.ArgumentParser(
        prog="photobio",
        description="Phototactic bioconvection: equilibrium profiles, "
                    "instability onset, and nonlinear roll states.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, help="path to a key = value config file")
    ap.add_argument("--out", default=".", help="output directory (created if absent)")
    ap.add_argument("--r-mult", type=float, default=None,
                    help="force R to this multiple of the computed R_c, "
                         "overriding the config's R or R_mult")
    ap.add_argument("--override", action="append", metavar="KEY=VAL",
                    help="set a config key from the command line (repeatable)")
    return ap


def _error_record(out_dir, mode, exc):
    record = {"error": type(exc).__name__, "message": str(exc), "mode": mode}
    try:
        (Path(out_dir) / "error.json").write_text(
            json.dumps(record, indent=2) + "\n")
    except OSError:
        pass  # the stderr line below still carries the news
    return record


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        params = load_config(Path(args.config).read_text(),
                             overrides=_parse_overrides(args.override))
        if args.r_mult is not None:
            params = dataclasses.replace(params, R=None, R_mult=args.r_mult)
        if args.mode == "basic":
            pipeline.run_basic(params, out)
        elif args.mode == "onset":
            pipeline.run_onset(params, out)
        elif args.mode == "simulate":
            pipeline.run_simulate(params, out)
        else:
            pipeline.run_sweep(params, out)
    except Exception as exc:
        _error_record(out, args.mode, exc)
        print(f"photobio {args.mode}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
