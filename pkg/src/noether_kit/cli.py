"""Command line front end: ``noether-kit analyze`` and ``noether-kit self-test``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import __version__
from .declaration import DeclarationError, load
from .expr import configure_probe
from .expr.probe import ProbeDisagreement, ProbeWarning
from .pipeline import PipelineError, run_analysis
from .report import build_report, to_json, to_text

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noether-kit",
                                 description="Constraint analysis and Noether symmetry checks for singular Lagrangians.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze a system declaration file")
    an.add_argument("file")
    an.add_argument("--generator", action="append", default=[], metavar="EXPR",
                    help="extra generating function G(t,q,p) to check (repeatable)")
    an.add_argument("--solve-gauge", action="append", default=[], metavar="SEED",
                    help="primary first-class constraint to build a gauge generator from (repeatable)")
    an.add_argument("--report-dir", metavar="DIR", help="write report.json and report.txt here")
    an.add_argument("--probe-seed", type=int)
    an.add_argument("--probe-points", type=int)
    an.add_argument("--no-probe", action="store_true", help="disable the numeric zero cross-check")
    an.add_argument("--max-depth", type=int)
    an.add_argument("--ansatz-degree", type=int)
    an.add_argument("--json", action="store_true", help="print the JSON report instead of the text report")

    st = sub.add_parser("self-test", help="run the bundled fixtures and identity suites")
    st.add_argument("--probe-seed", type=int)
    st.add_argument("--probe-points", type=int)
    st.add_argument("--fixture", action="append", default=[], metavar="FILE",
                    help="check this fixture instead of the bundled ones (repeatable)")
    return ap


def _analyze(args) -> int:
    decl = load(args.file)
    seed = args.probe_seed if args.probe_seed is not None else decl.options["probe_seed"]
    points = args.probe_points if args.probe_points is not None else decl.options["probe_points"]
    configure_probe(enabled=not args.no_probe, seed=seed, points=points)
    an = run_analysis(decl, args.generator, args.solve_gauge, args.max_depth, args.ansatz_degree, seed)
    report = build_report(an)
    js, txt = to_json(report), to_text(report)
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(js, encoding="utf-8")
        (out / "report.txt").write_text(txt, encoding="utf-8")
    sys.stdout.write(js if args.json else txt)
    return an.exit_status


def _self_test(args) -> int:
    from .selftest import run_self_test
    configure_probe(enabled=True, seed=args.probe_seed, points=args.probe_points)
    return run_self_test(args.fixture or None, seed=args.probe_seed, out=sys.stdout)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ProbeWarning)
            if args.command == "analyze":
                return _analyze(args)
            return _self_test(args)
    except DeclarationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ProbeDisagreement as exc:
        print(f"internal error [expr_core]: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
