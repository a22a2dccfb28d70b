"""Command-line entry point: jcplot --panel ID --csv FILE [--csv FILE2] --out FILE.png"""

import argparse
import sys

from .panels import PANELS, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcplot", description="Render figure panels from jcsim CSV output."
    )
    parser.add_argument(
        "--panel", required=True, metavar="ID",
        help=f"panel id; one of: {', '.join(sorted(PANELS))}",
    )
    parser.add_argument(
        "--csv", action="append", default=[], metavar="FILE",
        help="input CSV (repeat for one subplot per file)",
    )
    parser.add_argument("--out", required=True, metavar="FILE.png", help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.panel, args.csv, args.out)
    except SchemaError as err:
        print(f"jcplot: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"jcplot: error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
