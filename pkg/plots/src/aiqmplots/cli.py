"""Command line: render a figure spec into vector images.

    plots <figure-spec.json> --out <dir>

The spec names input CSVs produced by the simulator CLI; rendering never
modifies them.  Exit status 0 on success, 1 on bad inputs.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import PlotDataError
from .figures import load_figure_spec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render simulator result tables to vector figures")
    parser.add_argument("figure_spec", help="path to a figure-spec JSON file")
    parser.add_argument("--out", default="figures", help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_figure_spec(args.figure_spec)
        written = render(spec, args.out)
    except (PlotDataError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
