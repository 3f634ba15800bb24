"""Command line for the figure builders.

    cavitysr-plot dynamics sf.csv sr.csv --labels inverted tilted \
        -y n_over_N -o photon.png
    cavitysr-plot risetime sweep_a.csv sweep_b.csv -o tau.png --linear
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .plots import PlotSpec, load_style, plot_dynamics, plot_risetime


def build_parser():
    parser = argparse.ArgumentParser(prog="cavitysr-plot")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("dynamics", "risetime"):
        sub = subs.add_parser(name)
        sub.add_argument("inputs", nargs="+", help="input CSV files")
        sub.add_argument("--labels", nargs="*", default=[])
        sub.add_argument("-y", "--y-column",
                         default="n_over_N" if name == "dynamics" else "tau_fs")
        sub.add_argument("-o", "--output", default=f"{name}.png")
        sub.add_argument("--linear", action="store_true",
                         help="linear instead of log y axis")
        sub.add_argument("--title", default="")
        sub.add_argument("--style", default=None, help="style config file")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(inputs=args.inputs, labels=args.labels,
                        y_column=args.y_column, logy=not args.linear,
                        output=args.output, title=args.title,
                        style=load_style(args.style))
        if args.command == "dynamics":
            out = plot_dynamics(spec)
        else:
            out = plot_risetime(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
