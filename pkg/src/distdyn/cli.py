"""``distdyn`` command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import WEIGHT_MODES, load_config
from .errors import DistDynError

EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="INI configuration file")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--grid-size", type=int)
    p.add_argument("--tau", type=int)
    p.add_argument("--weight", action="append", choices=WEIGHT_MODES,
                   help="weight mode; repeat for several (overrides the config list)")
    p.add_argument("--svg", action="store_true", default=None, help="also write SVG renderings")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distdyn",
                                     description="Weighted distribution dynamics of a panel variable.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("dispersion", "coefficient of variation and interregional ratios"),
                        ("snapshot", "cross-sectional densities in selected years"),
                        ("dynamics", "stochastic kernel, NTP and ergodic distribution"),
                        ("conditional", "space / income / capital conditioned dynamics"),
                        ("emissions", "CO2 and intensity from fuel consumption")]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "snapshot":
            p.add_argument("--years", type=int, nargs="+")
        if name == "conditional":
            p.add_argument("conditioner", nargs="+", choices=pipeline.CONDITIONERS)
    return parser


def run(args) -> pipeline.RunReport:
    cfg = load_config(args.config, out=args.out, grid_size=args.grid_size, tau=args.tau,
                      weights=tuple(args.weight) if args.weight else None, svg=args.svg)
    if args.command == "dispersion":
        return pipeline.run_dispersion(cfg)
    if args.command == "snapshot":
        return pipeline.run_snapshot_densities(cfg, args.years)
    if args.command == "dynamics":
        return pipeline.run_dynamics(cfg)
    if args.command == "emissions":
        return pipeline.run_emissions(cfg)
    merged = pipeline.RunReport(f"conditional {' '.join(args.conditioner)}", cfg)
    for c in args.conditioner:
        r = pipeline.run_conditional(cfg, c)
        merged.outputs.extend(r.outputs)
        merged.overlays.extend(g for g in r.overlays if g not in merged.overlays)
        merged.notes.extend(r.notes)
        merged.converged &= r.converged
    return merged


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = run(args)
        manifest = pipeline.finish(report)
    except DistDynError as exc:
        print(f"distdyn: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for note in report.notes:
        print(f"distdyn: note: {note}", file=sys.stderr)
    print(f"wrote {len(set(report.outputs))} files; manifest {manifest}")
    return 0 if report.converged else EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
