"""Command-line entry point: ``spinxfer <kind> [options]``.

Exit codes: 0 success, 1 invalid input or missing config, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .config import KINDS, build_config, read_config_file
from .errors import ConfigError, SpinXferError

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2

HELP = {
    "free-sweep-n": "compensated free transfer versus chain length",
    "compensation-scan": "peak fidelity versus deviation from the compensating field",
    "adiabatic-run": "Landau-Zener sweep through the anticrossing",
    "leakage-vs-field": "time-averaged interior leakage versus terminal field",
    "monte-carlo-fidelity": "fidelity, entanglement and leakage statistics over disorder",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; here bad input is exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", help="flat TOML config file")
    p.add_argument("--seed", help="master seed (overrides config and $SPINXFER_SEED)")
    p.add_argument("--out", help="output directory (default runs/<kind>)")
    p.add_argument("--realizations", help="disorder realizations per grid point")
    p.add_argument("--workers", help="worker processes")
    p.add_argument("--emit-plot-data", action="store_true", default=None,
                   help="also write plot_<kind>.csv")
    p.add_argument("--n", help="chain length(s): 10, 5,6,7 or 5:15")
    p.add_argument("--sigma-j2", help="normalized coupling variance")
    p.add_argument("--sigma-b2", help="normalized field variance")
    p.add_argument("--b-field", help="mean terminal field(s), comma separated")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_kind_specific(p, kind):
    if kind == "compensation-scan":
        p.add_argument("--deviations", help="field deviations from compensation, comma separated")
    if kind == "adiabatic-run":
        p.add_argument("--beta", help="sweep range in units of V")
        p.add_argument("--f-target", help="target fidelity in (0, 1)")
        p.add_argument("--alpha-scale", help="multiplier on the Landau-Zener sweep rate")
        p.add_argument("--settle", help="post-sweep window in units of the free transfer time")
        p.add_argument("--sweep-site", choices=("first", "last"))
        p.add_argument("--tol", help="integrator tolerance per unit time")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinxfer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in KINDS:
        p = sub.add_parser(kind, help=HELP[kind])
        _add_common(p)
        _add_kind_specific(p, kind)
    return parser


_NOT_CONFIG = {"kind", "config", "verbose"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items() if v is not None and k not in _NOT_CONFIG}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.kind, file_values, overrides)
    except ConfigError as exc:
        print(f"spinxfer: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT

    from .experiments import run_experiment

    try:
        artifact = run_experiment(cfg)
    except SpinXferError as exc:
        print(f"spinxfer: run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    m = artifact.manifest
    print(f"{cfg.kind}: {m['tasks']} task(s), {m['failures']} failed, output in {artifact.out_dir}")
    return EXIT_OK
