#!/usr/bin/env python3
"""
casp-forge command line
    casp-forge encode INSTANCE --encoding range --hall-bound 2 --out prog.lp
    casp-forge solve INSTANCE --encoding B
    casp-forge verify --oracle ac --instances 1000
    casp-forge bench --family pigeonhole --n 8 10 --encodings S B R --csv out.csv
Results are printed as one JSON object on stdout; logs go to stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench_report import write_pdf_report, write_workbook
from .bench_runner import run_bench, write_csv
from .cdnl_solver import HEURISTICS, SAT, UNSAT, SolverConfig, extract_solution, solve
from .csp_format import emit_program, parse_csp
from .csp_model import normalize
from .encoders import REGION_MODES, EncodingKind, encode
from .errors import CaspForgeError
from .generators import FAMILIES, QCP
from .propagation_engine import compile_program
from .settings import load_settings
from .theorem_checks import ORACLES, run_suites

logger = logging.getLogger("casp_forge")

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_UNKNOWN = 30


def _emit(payload):
    print(json.dumps(payload, indent=2))


def _read_instance(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_csp(text)


def _kind(args):
    return EncodingKind.parse(args.encoding, args.hall_bound)


def _add_encoding_flags(parser):
    parser.add_argument("instance", help="CSP file (line format or JSON), - for stdin")
    parser.add_argument("--encoding", default="support", help="direct|support|bound|range or S, D, B, R, B3, R1 ...")
    parser.add_argument("--hall-bound", type=int, default=None, help="Hall bound k for bound/range")
    parser.add_argument("--regions", choices=REGION_MODES, default="maximal")


def _add_budget_flags(parser, settings):
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--budget-s", type=float, default=settings.budget_s)
    parser.add_argument("--budget-conflicts", type=int, default=None)
    parser.add_argument("--heuristic", choices=HEURISTICS, default="activity")


def _config(args):
    return SolverConfig(
        heuristic=args.heuristic,
        seed=args.seed,
        max_conflicts=args.budget_conflicts,
        time_budget_s=args.budget_s,
    )


def cmd_encode(args):
    norm = normalize(_read_instance(args.instance))
    program = encode(norm.normalized, _kind(args), regions=args.regions)
    text = emit_program(program)
    if args.out is None:
        sys.stdout.write(text)
        return 0
    Path(args.out).write_text(text)
    _emit(
        {
            "success": True,
            "encoding": _kind(args).label,
            "atoms": len(program.atoms),
            "rules": len(program.rules),
            "tight": program.is_tight,
            "output": args.out,
        }
    )
    return 0


def cmd_solve(args):
    norm = normalize(_read_instance(args.instance))
    kind = _kind(args)
    store = compile_program(encode(norm.normalized, kind, regions=args.regions))
    result = solve(store, _config(args))
    payload = {"success": True, "status": result.status, "encoding": kind.label, "stats": result.stats.as_dict()}
    if result.status == SAT:
        assignment = extract_solution(result.model, kind, norm.normalized)
        payload["assignment"] = norm.denormalize_assignment(assignment)
    _emit(payload)
    if result.status == SAT:
        return EXIT_SAT
    if result.status == UNSAT:
        return EXIT_UNSAT
    return EXIT_UNKNOWN


def cmd_verify(args):
    reports = run_suites(args.oracle, args.instances, args.seed)
    passed = all(report.passed for report in reports)
    _emit({"success": passed, "oracle": args.oracle, "suites": [report.as_dict() for report in reports]})
    return 0 if passed else 1


def _param_sets(args):
    if args.family == QCP:
        return [{"n": n, "ratio": ratio} for n in args.n for ratio in args.ratio]
    return [{"n": n} for n in args.n]


def cmd_bench(args):
    records = []
    for offset in range(args.seeds):
        cfg = SolverConfig(
            heuristic=args.heuristic,
            seed=args.seed + offset,
            max_conflicts=args.budget_conflicts,
            time_budget_s=args.budget_s,
        )
        records += run_bench(args.family, _param_sets(args), args.encodings, cfg, args.regions, args.workers)

    if args.xlsx:
        write_workbook(records, args.xlsx)
    if args.pdf:
        write_pdf_report(records, args.pdf, f"{args.family} benchmark")
    if args.csv is None:
        write_csv(records, sys.stdout)
        return 0
    with open(args.csv, "w", newline="") as stream:
        write_csv(records, stream)
    counts = {}
    for record in records:
        counts[record.status] = counts.get(record.status, 0) + 1
    _emit({"success": True, "rows": len(records), "status_counts": counts, "csv": args.csv})
    return 0


def build_parser(settings):
    parser = argparse.ArgumentParser(prog="casp-forge", description="Compile CSPs to logic programs, propagate and solve them")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="print the ground program of an instance")
    _add_encoding_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("solve", help="solve an instance; exit 10 sat, 20 unsat, 30 unknown")
    _add_encoding_flags(p)
    _add_budget_flags(p, settings)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the propagation-vs-oracle suites")
    p.add_argument("--oracle", choices=ORACLES, required=True)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--seed", type=int, default=settings.seed)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run a benchmark family and write CSV rows")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--ratio", type=int, nargs="+", default=[0], help="qcp preassignment percentages")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds per cell")
    p.add_argument("--encodings", nargs="+", default=["S", "B", "R"])
    p.add_argument("--regions", choices=REGION_MODES, default="maximal")
    p.add_argument("--workers", type=int, default=settings.workers)
    p.add_argument("--csv", default=None)
    p.add_argument("--xlsx", default=None)
    p.add_argument("--pdf", default=None)
    _add_budget_flags(p, settings)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    try:
        settings = load_settings()
    except CaspForgeError as exc:
        _emit({"success": False, "error": str(exc)})
        return 1

    args = build_parser(settings).parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        logger.debug("command failed", exc_info=True)
        _emit({"success": False, "error": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
