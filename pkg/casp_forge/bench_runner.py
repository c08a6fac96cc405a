"""
Benchmark runner
Generates instances, solves them under each requested encoding and writes
one CSV row per (instance, encoding) cell.
"""

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass

from .cdnl_solver import SAT, UNKNOWN, SolverConfig, extract_solution, solve
from .csp_model import evaluate, normalize
from .encoders import BOUND, RANGE, EncodingKind, encode
from .errors import CaspForgeError
from .generators import generate
from .propagation_engine import compile_program

logger = logging.getLogger(__name__)

CSV_HEADER = ("family", "params", "encoding", "k", "status", "time_s", "decisions", "conflicts", "propagations", "seed")


@dataclass(frozen=True)
class BenchRecord:
    family: str
    params: str
    encoding: str
    k: int | str
    status: str
    time_s: float
    decisions: int
    conflicts: int
    propagations: int
    seed: int
    note: str = ""

    def __post_init__(self):
        if self.status not in ("sat", "unsat", "unknown"):
            raise ValueError(f"bad status: {self.status}")
        if self.time_s < 0:
            raise ValueError("time_s must be non-negative")

    def row(self):
        return list(astuple(self))


def format_params(params):
    return ";".join(f"{key}={params[key]}" for key in sorted(params))


def parse_params(text):
    params = {}
    for item in filter(None, text.split(";")):
        key, _, value = item.partition("=")
        params[key.strip()] = int(value)
    return params


def _run_cell(family, params, kind, cfg, regions):
    seed = cfg.seed
    started = time.perf_counter()
    label = kind.label
    try:
        csp = generate(family, params, seed)
        norm = normalize(csp)
        d = norm.normalized.max_value
        k = kind.k(d) if kind.name in (BOUND, RANGE) else ""
        store = compile_program(encode(norm.normalized, kind, regions=regions))
        result = solve(store, cfg)
    except CaspForgeError as exc:
        logger.warning("%s %s %s failed: %s", family, format_params(params), label, exc)
        return BenchRecord(family, format_params(params), label, "", UNKNOWN, time.perf_counter() - started, 0, 0, 0, seed, str(exc))

    elapsed = time.perf_counter() - started
    note = ""
    if result.status == SAT:
        try:
            assignment = extract_solution(result.model, kind, norm.normalized)
            if not evaluate(norm.normalized, assignment).is_solution:
                note = "model failed verification"
        except CaspForgeError as exc:
            note = str(exc)
    stats = result.stats
    logger.info("%s %s %s: %s in %.2fs", family, format_params(params), label, result.status, elapsed)
    return BenchRecord(
        family, format_params(params), label, k, result.status, round(elapsed, 6),
        stats.decisions, stats.conflicts, stats.propagations, seed, note,
    )


def _run_packed(args):
    return _run_cell(*args)


def run_bench(family, param_sets, encodings, cfg=None, regions="maximal", workers=1):
    """
    Run every (params, encoding) cell

    Args:
        family: pigeonhole, qcp or graceful
        param_sets: list of generator parameter dicts, e.g. [{"n": 10}]
        encodings: EncodingKind objects or names such as "S", "B3"
        cfg: SolverConfig carrying seed and budgets
        workers: process count; rows keep parameter order either way

    Returns:
        list of BenchRecord in (params, encoding) order
    """
    cfg = cfg or SolverConfig()
    kinds = [kind if isinstance(kind, EncodingKind) else EncodingKind.parse(kind) for kind in encodings]
    cells = [(family, params, kind, cfg, regions) for params in param_sets for kind in kinds]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_packed, cells))
    return [_run_cell(*cell) for cell in cells]


def write_csv(records, stream):
    """Fixed header plus a trailing note column."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*CSV_HEADER, "note"])
    for record in records:
        writer.writerow(record.row())

