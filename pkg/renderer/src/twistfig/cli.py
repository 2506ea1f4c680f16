"""Command line: twistfig <kind> <inputs...> -o <path>."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, InputError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistfig",
        description="Render spin-squeezing figures from CSV/JSON data files",
    )
    parser.add_argument("kind", help=f"figure kind: one of {', '.join(KINDS)}")
    parser.add_argument("inputs", nargs="+", help="input CSV files")
    parser.add_argument("-o", "--output", required=True, help="output image path (.svg/.png/.pdf)")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          output=args.output, title=args.title)
        out = render(spec)
    except InputError as exc:
        print(f"twistfig: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"twistfig: unexpected failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
