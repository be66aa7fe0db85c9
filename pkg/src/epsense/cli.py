"""Command-line entry point: ``epsense <task> [--config FILE] [--out DIR]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .config import TASKS, RunConfig, load
from .errors import ConfigError, EPSenseError
from .runner import FIGURES, figdata, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ROW_ERRORS = 3
EXIT_FAILURE = 1

log = logging.getLogger("epsense")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="epsense", description="EP sensing with squeezed optomechanical resonators")
    p.add_argument("--version", action="version", version=f"epsense {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in TASKS + ("figdata",):
        s = sub.add_parser(name)
        s.add_argument("--config", help="run configuration file")
        s.add_argument("--out", help="output directory (default: stdout)")
        s.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--strict", action="store_true", help="exit 3 if any row failed")
        s.add_argument("-v", "--verbose", action="store_true")
        if name == "figdata":
            s.add_argument("--figure", required=True, choices=FIGURES)
    return p


def _emit(tables, out_dir, fmt_name) -> None:
    if out_dir is None:
        for t in tables:
            sys.stdout.write(t.render(fmt_name))
        return
    os.makedirs(out_dir, exist_ok=True)
    for t in tables:
        path = os.path.join(out_dir, f"{t.name}.{fmt_name}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(t.render(fmt_name))
        log.info("wrote %s (%d rows)", path, len(t.rows))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        if args.command == "figdata":
            base = load(args.config).params if args.config else None
            tables = list(figdata(args.figure, base).values())
        else:
            cfg = load(args.config, task=args.command) if args.config else RunConfig(task=args.command)
            tables = [run(cfg, threads=args.threads)]
            out_dir = args.out or cfg.output
            args.out = out_dir
    except ConfigError as exc:
        print(f"epsense: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EPSenseError as exc:
        print(f"epsense: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    _emit(tables, args.out, args.format)
    failed = sum(t.failed_rows for t in tables)
    if failed:
        print(f"epsense: {failed} row(s) failed", file=sys.stderr)
        if args.strict:
            return EXIT_ROW_ERRORS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
