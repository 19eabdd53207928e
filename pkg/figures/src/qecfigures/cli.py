"""``render <kind> --in <csv...> --out <file>`` entry point."""

from __future__ import annotations

import argparse
import sys
import warnings

from .render import FigureSpec, SchemaError, render_heatmap, render_line


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="render", description="Render qecenergy sweep CSVs as figures."
    )
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind, help_text in (
        ("line", "error vs energy, one curve per code/variant"),
        ("heatmap", "one (energy x p_x) panel per code"),
    ):
        p = sub.add_parser(kind, help=help_text)
        p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="CSV")
        p.add_argument("--out", required=True, metavar="FILE")
        p.add_argument("--px", type=float, default=None, help="channel rate (line plots)")
        p.add_argument("--title", default="")
        p.add_argument("--dpi", type=int, default=150)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=args.inputs,
        output=args.out,
        p_x=args.px,
        title=args.title,
        dpi=args.dpi,
    )
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.kind == "line":
                render_line(spec)
            else:
                render_heatmap(spec)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
