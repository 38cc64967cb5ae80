"""Command line: plotkit {deviation | field | convergence}.

Every subcommand takes --input (repeatable where several curves make
sense) and --out; input problems exit with code 2.
"""

import argparse
import sys

import matplotlib

from .figures import FigureSpec, render
from .readers import InputError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="figures from solver ledger CSVs and VTK snapshots")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dev = sub.add_parser(
        "deviation", help="log-scale |dJ| versus time from ledger CSVs")
    p_dev.add_argument("--input", action="append", required=True,
                       help="ledger CSV (repeat for overlaid curves)")
    p_dev.add_argument("--label", action="append",
                       help="curve label (one per --input)")
    p_dev.add_argument("--out", required=True, help="output image path")

    p_field = sub.add_parser(
        "field", help="pseudocolor of one field from a VTK snapshot")
    p_field.add_argument("--input", required=True, help="VTK snapshot")
    p_field.add_argument("--variable", required=True,
                         help="point-data name (rho, velocity, p, J)")
    p_field.add_argument("--out", required=True, help="output image path")

    p_conv = sub.add_parser(
        "convergence", help="log-log error versus h from study CSVs")
    p_conv.add_argument("--input", action="append", required=True,
                        help="study CSV (repeat for overlaid curves)")
    p_conv.add_argument("--label", action="append",
                        help="curve label (one per --input)")
    p_conv.add_argument("--out", required=True, help="output image path")

    args = parser.parse_args(argv)
    matplotlib.use("Agg")

    try:
        if args.command == "field":
            spec = FigureSpec(inputs=(args.input,), kind="field",
                              out=args.out, variable=args.variable)
        else:
            spec = FigureSpec(inputs=tuple(args.input), kind=args.command,
                              out=args.out, labels=args.label)
        render(spec)
    except InputError as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    print(f"{args.out}: written")
    return 0


if __name__ == "__main__":
    sys.exit(main())
