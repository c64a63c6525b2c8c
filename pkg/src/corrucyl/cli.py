"""``corrucyl`` command line: sweeps, regime maps, config validation and figures.

Exit codes: 0 success, 1 invalid config, 2 convergence failure of a
single-point run (or of any point of a figure).  Multi-point sweeps record
failures in their rows and still exit 0.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_IDS, reproduce_figure, write_figure
from .sweep import ConfigError, load_config, run_sweep, validate_config

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE = 0, 1, 2


def _print_diagnostics(diags, source):
    for d in diags:
        print(d.format(source), file=sys.stderr)


def _run(path: str, out: str | None, target: str | None, workers: int | None) -> int:
    try:
        spec = load_config(path, target)
    except ConfigError as exc:
        _print_diagnostics(exc.diagnostics, path)
        return EXIT_INVALID
    text, rows = run_sweep(spec, workers)
    dest = out or spec.output
    if dest:
        Path(dest).parent.mkdir(parents=True, exist_ok=True)
        Path(dest).write_text(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in rows if not r.converged]
    for r in failed:
        print(f"warning: point not converged: {r.message}", file=sys.stderr)
    if failed and len(rows) == 1:
        return EXIT_CONVERGENCE
    return EXIT_OK


def _validate(path: str, target: str | None = None) -> int:
    diags = validate_config(path, target)
    if diags:
        _print_diagnostics(diags, path)
        return EXIT_INVALID
    print(f"{path}: ok")
    return EXIT_OK


def _figure(fid: str, out: str, workers: int | None) -> int:
    result = reproduce_figure(fid, workers=workers)
    csv_path, plot_path = write_figure(result, out)
    print(f"{fid}: wrote {csv_path} and {plot_path}")
    if result.failures:
        print(f"{fid}: {result.failures} point(s) did not converge", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corrucyl", description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $CORRUCYL_WORKERS or the CPU count)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="run a parameter sweep described by an INI config")
    s.add_argument("config")
    s.add_argument("--out", help="CSV destination (overrides [output] path; default stdout)")

    r = sub.add_parser("regime-map", help="peak/valley/intermediate labels over a parameter grid")
    r.add_argument("config")
    r.add_argument("--out")

    v = sub.add_parser("validate", help="check a config and report problems with line numbers")
    v.add_argument("config")

    f = sub.add_parser("figure", help="reproduce a reference figure as CSV plus plot script")
    f.add_argument("id", choices=FIGURE_IDS)
    f.add_argument("--out", default=".", help="output directory")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _run(args.config, args.out, None, args.workers)
        if args.command == "regime-map":
            return _run(args.config, args.out, "regime_map", args.workers)
        if args.command == "validate":
            return _validate(args.config)
        return _figure(args.id, args.out, args.workers)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
