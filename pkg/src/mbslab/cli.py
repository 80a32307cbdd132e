"""Command-line front end.

    mbslab run <preset|config-path> [--out DIR] [--dz X] [--courant X]
               [--duration X] [--analytic-only] [--quiet]
    mbslab presets

Flags override the corresponding config fields (flag > config file > preset
default).  Exit codes: 0 success, 2 configuration error, 3 numerical
divergence, 4 post-processing error.
"""

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import (
    ConfigError,
    DivergedSimulationError,
    FitFailedError,
    IntegratorInstabilityError,
    InvalidParameterError,
    MBSlabError,
)
from .presets import PRESET_NAMES, preset
from .runner import run_scenario

EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_POSTPROCESS = 4


def build_parser():
    p = argparse.ArgumentParser(prog="mbslab",
                                description="1D slab spectroscopy simulator")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a preset or a config file")
    runp.add_argument("scenario", help="preset name or path to a config file")
    runp.add_argument("--out", default="out", help="output directory")
    runp.add_argument("--dz", type=float, help="override grid cell size [m]")
    runp.add_argument("--courant", type=float, help="override Courant number")
    runp.add_argument("--duration", type=float, help="override run time [s]")
    runp.add_argument("--analytic-only", action="store_true",
                      help="closed-form spectra only, no time stepping")
    runp.add_argument("--quiet", action="store_true",
                      help="suppress the summary on stdout")

    sub.add_parser("presets", help="list preset names")
    return p


def _resolve_config(args):
    name = args.scenario
    if name in PRESET_NAMES:
        cfg = preset(name)
        tag = name
    elif Path(name).exists():
        cfg = load_config(name)
        tag = Path(name).stem
    else:
        raise ConfigError(
            f"{name!r} is neither a preset nor a config file; "
            f"valid presets: {', '.join(PRESET_NAMES)}")
    overrides = {}
    if args.dz is not None:
        overrides["dz"] = args.dz
    if args.courant is not None:
        overrides["courant"] = args.courant
    if args.duration is not None:
        overrides["duration"] = args.duration
    if args.analytic_only:
        overrides["mode"] = "analytic-only"
    if overrides:
        cfg = cfg.override(**overrides)
    return cfg, tag


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in PRESET_NAMES:
            print(name)
        return 0
    try:
        cfg, tag = _resolve_config(args)
    except (ConfigError, InvalidParameterError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run_scenario(cfg, args.out, quiet=args.quiet, preset_name=tag)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergedSimulationError, IntegratorInstabilityError) as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (FitFailedError, MBSlabError) as exc:
        print(f"post-processing error: {exc}", file=sys.stderr)
        return EXIT_POSTPROCESS
    return 0


if __name__ == "__main__":
    sys.exit(main())
