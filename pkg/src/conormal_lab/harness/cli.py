"""Command line entry point ``conormal-lab``."""

from __future__ import annotations

import argparse
import sys

from ..exceptions import ConfigInvalid, ConormalLabError, UnknownSuite
from .config import KINDS, load_config, validate_config
from .run import dumps, presets, run

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="conormal-lab", description=__doc__)
    parser.add_argument("--list-presets", action="store_true", help="print model and H presets")
    sub = parser.add_subparsers(dest="command")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a '{kind}' experiment")
        p.add_argument("--config", help="experiment config (JSON)", required=kind != "acceptance")
        p.add_argument("--out", help="output directory for report.json and CSV tables")
        p.add_argument("--seed", type=_seed, help="override the config seed")
        if kind == "acceptance":
            p.add_argument("--suite", help="registered suite name (instead of --config)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        print(dumps(presets()))
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "acceptance" and args.config is None:
            if not args.suite:
                raise ConfigInvalid("acceptance needs --config or --suite")
            cfg = validate_config({"kind": "acceptance", "params": {"suite": args.suite}}, seed=args.seed)
        else:
            cfg = load_config(args.config, kind=args.command, seed=args.seed)
        report = run(cfg, args.out)
    except (ConfigInvalid, UnknownSuite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConormalLabError, ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(dumps(report["payload"]))
    if args.command == "acceptance" and not report["payload"].get("passed", False):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
