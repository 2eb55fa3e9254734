"""Command-line entry point: ``ris-ee-figures render``."""
from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-ee-figures",
        description="Render static figures from ris-ee-lab result CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render one figure from result CSVs")
    rend.add_argument("--kind", required=True, choices=KINDS)
    rend.add_argument(
        "--in",
        dest="inputs",
        required=True,
        nargs="+",
        metavar="CSV",
        help="one or more result CSVs (rows are concatenated)",
    )
    rend.add_argument("--out", required=True, help="output image path (.svg or .png)")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        path = render(FigureSpec(inputs=tuple(args.inputs), kind=args.kind, output=args.out))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
