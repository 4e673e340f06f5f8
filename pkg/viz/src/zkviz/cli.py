"""Command line: ``zkviz RUN_DIR KIND --out FIG.png [--time T | --index I]``.

Exits 0 on success, 2 when the run directory does not match the
documented formats (missing/corrupt snapshot, bad series header), 1 on
other errors.
"""

import argparse
import sys

from .figures import FIGURE_KINDS, PlotSpec, render
from .runformat import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zkviz", description="render figures from a zkcyl run directory"
    )
    parser.add_argument("run_dir")
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    sel = parser.add_mutually_exclusive_group()
    sel.add_argument("--time", type=float, help="snapshot nearest this time")
    sel.add_argument("--index", type=int, help="snapshot by position")
    parser.add_argument(
        "--level", type=float, default=0.2, help="contour level for the cone fit"
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        run_dir=args.run_dir,
        kind=args.kind,
        out=args.out,
        time=args.time,
        index=args.index,
        level=args.level,
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    print(spec.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
