"""Command line entry point.

Exit codes: 0 when every enabled check passes, 1 on a failed check,
2 on a configuration error.  ``THRESHFLUX_OUT`` overrides the default
output root ``./out``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import scenario as sc
from ._backend import BACKEND
from .errors import ConfigError

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2


def _out_dir(args, s: sc.Scenario) -> Path:
    root = args.out or os.environ.get("THRESHFLUX_OUT") or "out"
    return Path(root) / s.name


def _print_checks(report: sc.RunReport) -> None:
    for c in report.checks:
        print(c.line())


def _cmd_run(args) -> int:
    s = sc.load_scenario(args.config)
    out = _out_dir(args, s)
    report = sc.run_scenario(s, out)
    _print_checks(report)
    print(f"{len(report.files)} files written to {out}")
    return report.exit_code


def _cmd_converge(args) -> int:
    s = sc.load_scenario(args.config)
    report = sc.RunReport(s.name)
    tables = sc.convergence_study(s, report=report)
    for t, rows in tables.items():
        print(f"t = {t:g}")
        print(f"{'n_cells':>8} {'dx':>12} {'l1_error':>12} {'order':>8}")
        for r in rows:
            print(f"{r.n_cells:>8d} {r.dx:>12.5e} {r.l1_error:>12.5e} {r.order:>8.4f}")
    _print_checks(report)
    return report.exit_code


def _cmd_certify(args) -> int:
    s = sc.load_scenario(args.config)
    report = sc.RunReport(s.name)
    sc.run_certifier(s, report)
    _print_checks(report)
    return report.exit_code


def _cmd_list(args) -> int:
    for name in sc.list_fixtures():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="threshflux", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s (fv backend: {BACKEND})")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="full pipeline with CSV output")
    r.add_argument("config", help="scenario TOML file or bundled fixture name")
    r.add_argument("--out", help="output root (default $THRESHFLUX_OUT or ./out)")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("converge", help="print the FV convergence table")
    c.add_argument("config")
    c.set_defaults(func=_cmd_converge)

    k = sub.add_parser("certify", help="run the entropy certifier only")
    k.add_argument("config")
    k.set_defaults(func=_cmd_certify)

    sub.add_parser("list-fixtures", help="names of the bundled scenarios").set_defaults(
        func=_cmd_list
    )
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
