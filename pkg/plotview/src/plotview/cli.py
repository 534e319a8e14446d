"""Command line wrapper: plotview render <csv> --out <prefix>."""

from __future__ import annotations

import argparse
import sys

from .frames import SchemaError
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotview",
        description="Render a maneuver trajectory CSV into result panels.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="write the three panel images")
    p_render.add_argument("csv", help="trajectory CSV path")
    p_render.add_argument("--out", required=True,
                          help="output prefix for the three PNG files")
    args = parser.parse_args(argv)
    try:
        for path in render(args.csv, args.out):
            print(f"wrote {path}")
    except (SchemaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
