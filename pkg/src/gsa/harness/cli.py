"""Command line: ``gsa run | report | list-algorithms | list-benchmarks``."""
from __future__ import annotations

import argparse
import logging
import sys

from ..benchmarks import BENCHMARKS
from .algorithms import ALGORITHMS
from .config import ConfigError, load_config
from .report import ReportError, write_report
from .runner import HarnessIOError, run_matrix

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _select(matrices: dict, matrix_id: str | None):
    if matrix_id is None:
        return list(matrices.values())
    if matrix_id not in matrices:
        raise ConfigError(f"no matrix {matrix_id!r}; defined: {', '.join(matrices)}")
    return [matrices[matrix_id]]


def _cmd_run(args) -> int:
    for m in _select(load_config(args.config), args.matrix):
        path = run_matrix(m, args.out, args.workers)
        print(path)
    return EXIT_OK


def _cmd_report(args) -> int:
    matrices = load_config(args.config)
    if args.matrix is None and len(matrices) != 1:
        raise ConfigError("config has several matrices; pick one with --matrix")
    (m,) = _select(matrices, args.matrix)
    print(write_report(args.results, m, args.reference, args.out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gsa", description="Typed-population optimizer experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute experiment matrices into CSV files")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    r.add_argument("--matrix", default=None, help="run only this matrix id")
    r.set_defaults(func=_cmd_run)

    rp = sub.add_parser("report", help="markdown report from a results CSV")
    rp.add_argument("--results", required=True)
    rp.add_argument("--config", required=True)
    rp.add_argument("--reference", required=True)
    rp.add_argument("--out", required=True)
    rp.add_argument("--matrix", default=None)
    rp.set_defaults(func=_cmd_report)

    la = sub.add_parser("list-algorithms")
    la.set_defaults(func=lambda a: print("\n".join(ALGORITHMS)) or EXIT_OK)
    lb = sub.add_parser("list-benchmarks")
    lb.set_defaults(func=lambda a: print("\n".join(BENCHMARKS)) or EXIT_OK)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HarnessIOError, ReportError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
