"""
Benchmark instance generators
Pigeon hole, quasigroup completion and graceful labelling of double wheels.
"""

import logging
import random

from .csp_model import ALL_DIFFERENT, ALLOWED, Constraint, CspInstance, VariableDecl
from .errors import InvalidGeneratorArgumentError

logger = logging.getLogger(__name__)

PIGEONHOLE = "pigeonhole"
QCP = "qcp"
GRACEFUL = "graceful"
FAMILIES = (PIGEONHOLE, QCP, GRACEFUL)


def gen_pigeonhole(n):
    """n pigeons p1..pn over holes [1, n-1], pairwise distinct."""
    if n < 2:
        raise InvalidGeneratorArgumentError(f"invalid generator argument: pigeonhole needs n >= 2, got {n}")
    holes = frozenset(range(1, n))
    variables = [VariableDecl(f"p{i}", holes) for i in range(1, n + 1)]
    alldiff = Constraint("holes", tuple(decl.name for decl in variables), ALL_DIFFERENT)
    return CspInstance(tuple(variables), (alldiff,))


def cell(r, c):
    return f"q_{r}_{c}"


def gen_qcp(n, ratio, seed=0):
    """
    Partial Latin square of order n with about ratio% of the cells preassigned

    Cells are visited in a seeded random order; each gets a uniformly chosen
    value not yet used in its row or column, and cells without such a value
    are left open. Preassigned cells get singleton domains.
    """
    if n < 1:
        raise InvalidGeneratorArgumentError(f"invalid generator argument: qcp needs n >= 1, got {n}")
    if not 0 <= ratio <= 100:
        raise InvalidGeneratorArgumentError(f"invalid generator argument: ratio {ratio} is outside [0, 100]")

    rng = random.Random(seed)
    target = ratio * n * n // 100
    cells = [(r, c) for r in range(1, n + 1) for c in range(1, n + 1)]
    rng.shuffle(cells)

    rows = {r: set() for r in range(1, n + 1)}
    cols = {c: set() for c in range(1, n + 1)}
    fixed = {}
    for r, c in cells:
        if len(fixed) == target:
            break
        candidates = [v for v in range(1, n + 1) if v not in rows[r] and v not in cols[c]]
        if not candidates:
            continue
        value = rng.choice(candidates)
        fixed[(r, c)] = value
        rows[r].add(value)
        cols[c].add(value)
    if len(fixed) < target:
        logger.info("qcp n=%d seed=%s: preassigned %d of %d cells", n, seed, len(fixed), target)

    full = frozenset(range(1, n + 1))
    variables = [
        VariableDecl(cell(r, c), frozenset({fixed[(r, c)]}) if (r, c) in fixed else full)
        for r in range(1, n + 1)
        for c in range(1, n + 1)
    ]
    constraints = [Constraint(f"row_{r}", tuple(cell(r, c) for c in range(1, n + 1)), ALL_DIFFERENT) for r in range(1, n + 1)]
    constraints += [Constraint(f"col_{c}", tuple(cell(r, c) for r in range(1, n + 1)), ALL_DIFFERENT) for c in range(1, n + 1)]
    return CspInstance(tuple(variables), tuple(constraints))


def distance_tuples(lo, hi):
    """(a, b, |a-b|) for distinct a, b in [lo, hi]."""
    return frozenset((a, b, abs(a - b)) for a in range(lo, hi + 1) for b in range(lo, hi + 1) if a != b)


def double_wheel_edges(n):
    """Edges of two n-cycles a1..an and b1..bn, every node joined to the hub."""
    edges = []
    for ring in ("a", "b"):
        edges += [("hub", f"{ring}{i}") for i in range(1, n + 1)]
        edges += [(f"{ring}{i}", f"{ring}{i % n + 1}") for i in range(1, n + 1)]
    return edges


def gen_graceful_double_wheel(n):
    """
    Graceful labelling of the double wheel with n-node rims

    Node labels range over [0, 4n] and are pairwise distinct; each edge gets
    a label variable over [1, 4n] tied to its endpoints by the distance
    relation (lowered through value atoms), and edge labels are pairwise
    distinct.
    """
    if n < 3:
        raise InvalidGeneratorArgumentError(f"invalid generator argument: graceful needs n >= 3, got {n}")
    m = 4 * n
    nodes = ["hub"] + [f"a{i}" for i in range(1, n + 1)] + [f"b{i}" for i in range(1, n + 1)]
    edges = double_wheel_edges(n)

    variables = [VariableDecl(node, frozenset(range(0, m + 1))) for node in nodes]
    variables += [VariableDecl(f"l_{u}_{v}", frozenset(range(1, m + 1))) for u, v in edges]
    relation = distance_tuples(0, m)
    constraints = [
        Constraint("nodes", tuple(nodes), ALL_DIFFERENT),
        Constraint("edges", tuple(f"l_{u}_{v}" for u, v in edges), ALL_DIFFERENT),
    ]
    constraints += [
        Constraint(f"dist_{u}_{v}", (u, v, f"l_{u}_{v}"), ALLOWED, relation, lowering="direct") for u, v in edges
    ]
    return CspInstance(tuple(variables), tuple(constraints))


def generate(family, params, seed=0):
    """Dispatch on the family name; params is a dict of generator arguments."""
    if family == PIGEONHOLE:
        return gen_pigeonhole(int(params["n"]))
    if family == QCP:
        return gen_qcp(int(params["n"]), int(params.get("ratio", 0)), seed)
    if family == GRACEFUL:
        return gen_graceful_double_wheel(int(params["n"]))
    raise InvalidGeneratorArgumentError(f"invalid generator argument: unknown family {family}")
