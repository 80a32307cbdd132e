"""Per-figure command line entry points.

    figplots fig2 --csv low.csv mid.csv high.csv --out fig2.svg
    figplots fig4 --csv spectrum.csv --response response.csv --out fig4.svg
    figplots fig5 --csv pulse_spectra.csv --out fig5.svg

Exit codes: 0 success, 2 missing file or schema mismatch.
"""

import argparse
import sys

from .plots import PlotSpec, plot_spectra
from .schema import SchemaError


def build_parser():
    p = argparse.ArgumentParser(prog="figplots",
                                description="figures from simulator CSV output")
    sub = p.add_subparsers(dest="layout", required=True)
    for name, helptext in (("fig2", "stacked extinction/T/R panels"),
                           ("fig4", "T,R + susceptibility + index panels"),
                           ("fig5", "pulse power spectra")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--csv", nargs="+", required=True, help="input CSV file(s)")
        q.add_argument("--out", required=True, help="output image path (.svg/.png)")
        q.add_argument("--range", nargs=2, type=float, default=(-60.0, 80.0),
                       metavar=("LO", "HI"), help="reduced-detuning axis range")
        q.add_argument("--label", nargs="*", default=[], help="curve labels")
        q.add_argument("--overlay", nargs="*", default=[],
                       help="closed-form spectrum CSVs drawn dashed")
        if name == "fig4":
            q.add_argument("--response", required=True,
                           help="response CSV (susceptibility and index)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(csv_paths=list(args.csv), layout=args.layout,
                    out_path=args.out, delta_range=tuple(args.range),
                    labels=list(args.label), overlay_csvs=list(args.overlay),
                    response_csv=getattr(args, "response", ""))
    try:
        out = plot_spectra(spec)
    except (FileNotFoundError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
