"""
Seeded equivalence suites
Random instance families and the checks that compare propagation on each
encoding with the brute-force consistency oracles.
"""

import logging
import random
from dataclasses import dataclass, field

from .asp_program import BOTTOM, Atom, GroundProgram, Rule, enumerate_answer_sets, is_answer_set_extended, transform_extended
from .cdnl_solver import SAT, UNSAT, SolverConfig, extract_solution, solve
from .consistency_oracles import DomainState, enforce_ac_binary, enforce_bound, enforce_domain, enforce_range, hall_intervals
from .csp_model import ALL_DIFFERENT, ALLOWED, FORBIDDEN, Constraint, CspInstance, VariableDecl, evaluate
from .encoders import BOUND, DIRECT, RANGE, SUPPORT, EncodingKind, encode
from .propagation_engine import CONFLICT, Literal, compile_program, propagate_encoding, unit_propagate

logger = logging.getLogger(__name__)

ORACLES = ("ac", "bound", "range", "domain")


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    mismatches: list = field(default_factory=list)
    # instances where the weaker side strictly lost to the stronger one
    witnesses: int = 0

    @property
    def passed(self):
        return not self.mismatches

    def as_dict(self):
        return {
            "suite": self.name,
            "checked": self.checked,
            "mismatches": len(self.mismatches),
            "witnesses": self.witnesses,
            "first_mismatches": self.mismatches[:5],
        }


# --------------------------------------------------------------- instances


def _variables(n, d):
    return tuple(VariableDecl(f"x{i}", frozenset(range(1, d + 1))) for i in range(1, n + 1))


def _random_relation(rng, d):
    density = rng.uniform(0.2, 0.8)
    tuples = set()
    for a in range(1, d + 1):
        for b in range(1, d + 1):
            if rng.random() < density:
                tuples.add((a, b))
    return frozenset(tuples)


def random_binary_csp(rng, max_vars=5, max_d=5, alldiff_rate=0.3, constraints=(1, 4)):
    """Binary extensional constraints (allowed or forbidden) mixed with all-different."""
    n = rng.randint(2, max_vars)
    d = rng.randint(2, max_d)
    variables = _variables(n, d)
    names = [decl.name for decl in variables]
    result = []
    for i in range(1, rng.randint(*constraints) + 1):
        if rng.random() < alldiff_rate:
            scope = rng.sample(names, rng.randint(2, n))
            result.append(Constraint(f"c{i}", tuple(scope), ALL_DIFFERENT))
        else:
            scope = rng.sample(names, 2)
            kind = rng.choice((ALLOWED, FORBIDDEN))
            result.append(Constraint(f"c{i}", tuple(scope), kind, _random_relation(rng, d)))
    return CspInstance(variables, tuple(result))


def random_alldiff_csp(rng, max_vars=6, max_d=6):
    """A single all-different over every variable; sub-domains drawn separately."""
    n = rng.randint(2, max_vars)
    d = rng.randint(2, max_d)
    variables = _variables(n, d)
    return CspInstance(variables, (Constraint("alldiff", tuple(decl.name for decl in variables), ALL_DIFFERENT),))


def random_subdomains(rng, csp, keep=0.7):
    domains = {}
    for decl in csp.variables:
        values = {v for v in decl.domain if rng.random() < keep}
        if not values:
            values = {rng.choice(sorted(decl.domain))}
        domains[decl.name] = values
    return DomainState(domains)


# ------------------------------------------------------------ comparisons


def _describe(index, csp, ds, got, expected):
    return {
        "instance": index,
        "constraints": [c.id for c in csp.constraints],
        "input": {name: sorted(ds[name]) for name in ds.names()},
        "encoding": {name: sorted(got[name]) for name in got.names()},
        "oracle": {name: sorted(expected[name]) for name in expected.names()},
    }


def check_support_arc_consistency(instances=1000, seed=0):
    """Support-encoding propagation equals AC on the binary decomposition."""
    rng = random.Random(seed)
    report = SuiteReport("support = arc consistency")
    for index in range(instances):
        csp = random_binary_csp(rng)
        ds = random_subdomains(rng, csp)
        got = propagate_encoding(csp, ds, EncodingKind(SUPPORT))
        expected = enforce_ac_binary(csp, ds).canonical()
        report.checked += 1
        if got != expected:
            report.mismatches.append(_describe(index, csp, ds, got, expected))
    return report


def check_range_consistency(instances=1000, seed=0, regions="maximal"):
    """Range-encoding propagation (k = d) equals range consistency."""
    rng = random.Random(seed)
    report = SuiteReport(f"range = range consistency ({regions} regions)")
    for index in range(instances):
        csp = random_binary_csp(rng)
        ds = random_subdomains(rng, csp)
        got = propagate_encoding(csp, ds, EncodingKind(RANGE), regions)
        expected = enforce_range(csp, ds).canonical()
        report.checked += 1
        if got != expected:
            report.mismatches.append(_describe(index, csp, ds, got, expected))
    return report


def _same_bounds(got, expected):
    if got.wiped_out or expected.wiped_out:
        return got.wiped_out == expected.wiped_out
    return all(got.bounds(name) == expected.bounds(name) for name in expected.names())


def check_bound_consistency(instances=1000, seed=0):
    """Bound-encoding propagation (k = d) has the bounds of bound consistency."""
    rng = random.Random(seed)
    report = SuiteReport("bound = bound consistency")
    for index in range(instances):
        csp = random_binary_csp(rng)
        ds = random_subdomains(rng, csp)
        got = propagate_encoding(csp, ds, EncodingKind(BOUND))
        expected = enforce_bound(csp, ds).canonical()
        report.checked += 1
        if not _same_bounds(got, expected):
            report.mismatches.append(_describe(index, csp, ds, got, expected))
    return report


def check_direct_weaker(instances=100, seed=0):
    """
    Direct-encoding propagation never prunes more than AC

    Counts as witnesses the instances where AC prunes strictly more.
    """
    rng = random.Random(seed)
    report = SuiteReport("direct >= arc consistency")
    for index in range(instances):
        csp = random_binary_csp(rng, alldiff_rate=0.0)
        ds = DomainState.from_csp(csp)
        got = propagate_encoding(csp, ds, EncodingKind(DIRECT))
        expected = enforce_ac_binary(csp, ds).canonical()
        report.checked += 1
        if not expected.is_subset_of(got):
            report.mismatches.append(_describe(index, csp, ds, got, expected))
        elif got != expected:
            report.witnesses += 1
    return report


def check_alldiff_hall(instances=500, seed=0):
    """
    Range propagation on all-different equals range consistency, and each
    removed value lies in a Hall interval the variable is not part of
    """
    rng = random.Random(seed)
    report = SuiteReport("all-different range = Hall pruning")
    for index in range(instances):
        csp = random_alldiff_csp(rng)
        ds = random_subdomains(rng, csp)
        got = propagate_encoding(csp, ds, EncodingKind(RANGE))
        expected = enforce_range(csp, ds).canonical()
        report.checked += 1
        if got != expected:
            report.mismatches.append(_describe(index, csp, ds, got, expected))
            continue
        if got.wiped_out:
            continue
        scope = csp.constraints[0].scope
        intervals = hall_intervals(got, scope)
        for name in scope:
            for value in ds[name] - got[name]:
                if not any(h.lo <= value <= h.hi and name not in h.members for h in intervals):
                    report.mismatches.append({"instance": index, "unexplained": [name, value]})
    return report


def check_strength_order(instances=200, seed=0):
    """domain consistency is at least as strong as range, range as bound."""
    rng = random.Random(seed)
    report = SuiteReport("domain <= range <= bound")
    for index in range(instances):
        csp = random_binary_csp(rng, max_vars=4, max_d=4)
        ds = random_subdomains(rng, csp)
        dc = enforce_domain(csp, ds).canonical()
        rc = enforce_range(csp, ds).canonical()
        bc = enforce_bound(csp, ds).canonical()
        report.checked += 1
        if not (dc.is_subset_of(rc) and rc.is_subset_of(bc)):
            report.mismatches.append(_describe(index, csp, ds, rc, dc))
        elif dc != bc:
            report.witnesses += 1
    return report


def run_suites(oracle, instances=None, seed=0):
    """The suites behind `casp-forge verify --oracle ...`."""
    if oracle not in ORACLES:
        raise ValueError(f"unknown oracle: {oracle}")

    def size(default):
        return default if instances is None else instances

    if oracle == "ac":
        return [check_support_arc_consistency(size(1000), seed), check_direct_weaker(size(100), seed)]
    if oracle == "range":
        return [check_range_consistency(size(1000), seed), check_alldiff_hall(size(500), seed)]
    if oracle == "bound":
        return [check_bound_consistency(size(1000), seed)]
    return [check_strength_order(size(200), seed)]


# ----------------------------------------------------- semantic agreement


def random_tiny_csp(rng):
    """At most 3 variables, d <= 3, at most 2 constraints."""
    return random_binary_csp(rng, max_vars=3, max_d=3, constraints=(1, 2))


def _projection(program, csp, kind):
    d = csp.max_value
    atoms = set()
    for name in csp.names:
        for i in range(1, d + 1):
            if kind.name == BOUND:
                atoms.add(Atom("b", (name, i)))
            elif kind.name == RANGE:
                atoms.add(Atom("r", (name, i, i)))
            else:
                atoms.add(Atom("e", (name, i)))
    return {atom for atom in atoms if atom in program}


def check_semantic_agreement(instances=200, seed=0, max_atoms=26):
    """
    solve's verdict matches the existence of answer sets, every sat model is
    an answer set, and its readout is a CSP solution
    """
    rng = random.Random(seed)
    report = SuiteReport("solver = answer-set semantics")
    for index in range(instances):
        csp = random_tiny_csp(rng)
        for name in (DIRECT, SUPPORT, BOUND, RANGE):
            kind = EncodingKind(name)
            program = encode(csp, kind)
            answer_sets = enumerate_answer_sets(program, _projection(program, csp, kind), max_atoms)
            result = solve(compile_program(program), SolverConfig(seed=seed))
            report.checked += 1
            problem = None
            if (result.status == SAT) != bool(answer_sets):
                problem = f"verdict {result.status} with {len(answer_sets)} answer sets"
            elif result.status == SAT:
                if not is_answer_set_extended(program, result.model):
                    problem = "model is not an answer set"
                elif not evaluate(csp, extract_solution(result.model, kind, csp)).is_solution:
                    problem = "model is not a solution"
            elif result.status != UNSAT:
                problem = f"status {result.status}"
            if problem:
                report.mismatches.append({"instance": index, "encoding": name, "problem": problem})
    return report


def random_cardinality_program(rng, atoms=5, heads=3):
    """A choice over a1..an and cardinality rules h <- k{...} over their literals."""
    base = [Atom(f"a{i}") for i in range(1, atoms + 1)]
    rules = [Rule.choice(base)]
    head_atoms = [Atom(f"h{i}") for i in range(1, heads + 1)]
    for head in head_atoms:
        for _ in range(rng.randint(1, 2)):
            body = rng.sample(base, rng.randint(2, atoms))
            pos = tuple(a for a in body if rng.random() < 0.6)
            neg = tuple(a for a in body if a not in pos)
            rules.append(Rule.cardinality(head, rng.randint(0, len(body) + 1), pos, neg))
    if rng.random() < 0.5:
        rules.append(Rule.cardinality(BOTTOM, rng.randint(1, atoms), tuple(rng.sample(base, rng.randint(1, atoms)))))
    program_atoms = (BOTTOM, *base, *head_atoms)
    return GroundProgram(program_atoms, tuple(rules))


def _random_assumptions(rng, program):
    candidates = [atom for atom in program.atoms if atom != BOTTOM]
    chosen = rng.sample(candidates, rng.randint(0, min(4, len(candidates))))
    return [Literal(atom, rng.random() < 0.5) for atom in chosen]


def _derived(outcome, atoms):
    if outcome.status == CONFLICT:
        return CONFLICT
    return frozenset((atom, outcome.assignment[atom]) for atom in atoms if outcome.assignment.get(atom) is not None)


def check_cardinality_ladder(instances=200, seed=0):
    """Native counters derive what propagation on the counter ladder derives."""
    rng = random.Random(seed)
    report = SuiteReport("native cardinality = counter ladder")
    for index in range(instances):
        program = random_cardinality_program(rng)
        assumptions = _random_assumptions(rng, program)
        native = unit_propagate(compile_program(program), assumptions)
        ladder = unit_propagate(compile_program(transform_extended(program)), assumptions)
        report.checked += 1
        if _derived(native, program.atoms) != _derived(ladder, program.atoms):
            report.mismatches.append({"instance": index, "assumptions": [str(lit) for lit in assumptions]})
    return report
