"""Command line interface: ``sepbeam run <config.yaml> [options]``."""

from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENTS, ConfigError, load_config
from .runner import run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepbeam",
        description="Monte Carlo studies of separable rectangular-array beamformers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one experiment from a YAML config")
    runp.add_argument("config", help="path to the YAML experiment config")
    runp.add_argument("--out", default="results", help="output directory (default: results)")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    runp.add_argument("--trials", type=int, default=None, help="override the trial count")
    runp.add_argument("--workers", type=int, default=None, help="override the worker count")
    runp.add_argument(
        "--experiment",
        choices=EXPERIMENTS,
        default=None,
        help="override the experiment kind",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "seed": args.seed,
        "trials": args.trials,
        "workers": args.workers,
        "experiment": args.experiment,
    }
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    manifest = run(cfg, args.out)
    print(f"{cfg.experiment}: wrote {manifest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
