"""Command line entry point: `dramatopics <stage> [--config C] [--seed S] [--out-dir D]`."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, load_config, sample_config_path
from .corpus import CorpusError, FetchError
from .pipeline import RUNNERS, STAGES, StageError, run_all
from .topicmodel import ModelError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dramatopics", description="Diachronic topic analysis of dated corpora.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES + ("all",):
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "all" else "run every stage in order")
        p.add_argument("--config", help="JSON config file (default: bundled sample corpus config)")
        p.add_argument("--seed", type=int, help="random seed; overrides the config")
        p.add_argument("--out-dir", help="output directory; overrides the config")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config or sample_config_path(), seed=args.seed, out_dir=args.out_dir)
        if args.command == "all":
            run_all(cfg)
        else:
            RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (StageError, CorpusError, FetchError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
