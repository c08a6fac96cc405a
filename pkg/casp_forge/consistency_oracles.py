"""
Reference consistency oracles
Brute-force arc, bound, range and domain consistency plus Hall intervals.
These are the ground truth the encodings are measured against, so they
search supports exhaustively instead of filtering cleverly.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

from .csp_model import ALL_DIFFERENT, ALLOWED, NOT_EQUAL, binary_decomposition
from .errors import OracleTooLargeError

# brute-force support searches refuse larger products
MAX_SEARCH = 10**6


@dataclass(frozen=True)
class DomainState:
    """Current value set per variable; wiped-out states have every set empty."""

    domains: Mapping[str, frozenset]

    def __post_init__(self):
        object.__setattr__(self, "domains", {name: frozenset(vals) for name, vals in self.domains.items()})

    @classmethod
    def from_csp(cls, csp):
        return cls({decl.name: decl.domain for decl in csp.variables})

    @classmethod
    def wiped(cls, names):
        return cls({name: frozenset() for name in names})

    @property
    def wiped_out(self):
        return any(not vals for vals in self.domains.values())

    def __getitem__(self, name):
        return self.domains[name]

    def names(self):
        return tuple(self.domains)

    def hull(self, name):
        vals = self.domains[name]
        return range(min(vals), max(vals) + 1) if vals else range(0)

    def bounds(self, name):
        vals = self.domains[name]
        return (min(vals), max(vals)) if vals else None

    def with_domain(self, name, vals):
        domains = dict(self.domains)
        domains[name] = frozenset(vals)
        return DomainState(domains)

    def canonical(self):
        """Collapse any wiped-out state to the all-empty form."""
        return DomainState.wiped(self.domains) if self.wiped_out else self

    def is_subset_of(self, other):
        return all(self.domains[name] <= other.domains[name] for name in self.domains)


@dataclass(frozen=True)
class HallInterval:
    lo: int
    hi: int
    members: frozenset


def _search_guard(candidates):
    size = math.prod(len(c) for c in candidates)
    if size > MAX_SEARCH:
        raise OracleTooLargeError(size, MAX_SEARCH)


def _distinct_extension(candidates, used=frozenset(), pos=0):
    if pos == len(candidates):
        return True
    for value in candidates[pos]:
        if value not in used and _distinct_extension(candidates, used | {value}, pos + 1):
            return True
    return False


def has_support(c, candidates):
    """
    Whether some tuple drawn from the candidate lists satisfies c

    Args:
        c: constraint
        candidates: one collection of values per scope position
    """
    if any(not cand for cand in candidates):
        return False
    if c.kind == ALLOWED:
        sets = [set(cand) for cand in candidates]
        return any(all(v in s for v, s in zip(t, sets)) for t in c.tuples)
    if c.kind == ALL_DIFFERENT:
        # fewest candidates first keeps the backtracking shallow
        return _distinct_extension(sorted((list(cand) for cand in candidates), key=len))
    if c.kind == NOT_EQUAL:
        a, b = candidates
        return len(set(a) | set(b)) >= 2
    _search_guard(candidates)
    return any(c.holds(t) for t in itertools.product(*candidates))


def _fixpoint(csp, ds, revise):
    """Round-robin over constraints until no domain changes."""
    domains = {name: set(vals) for name, vals in ds.domains.items()}
    if any(not vals for vals in domains.values()):
        return DomainState.wiped(domains)
    changed = True
    while changed:
        changed = False
        for c in csp.constraints:
            if revise(c, domains):
                changed = True
                if any(not domains[name] for name in c.scope):
                    return DomainState.wiped(domains)
    return DomainState(domains)


class _Arc:
    __slots__ = ("x", "y", "check")

    def __init__(self, x, y, check):
        self.x = x
        self.y = y
        self.check = check


def binary_arcs(csp):
    """
    Directed binary arcs of the binary decomposition of csp

    all-different becomes pairwise disequalities; an n-ary extensional
    constraint contributes the projection of its relation onto every
    ordered pair of scope variables.
    """
    arcs = []
    unary = []
    for c in csp.constraints:
        parts = binary_decomposition(c) if c.kind == ALL_DIFFERENT else [c]
        for part in parts:
            if len(part.scope) == 1:
                unary.append(part)
            elif len(part.scope) == 2:
                x, y = part.scope
                arcs.append(_Arc(x, y, lambda a, b, part=part: part.holds((a, b))))
                arcs.append(_Arc(y, x, lambda a, b, part=part: part.holds((b, a))))
            else:
                allowed = part.allowed_tuples(csp.scope_domains(part))
                for i, j in itertools.permutations(range(len(part.scope)), 2):
                    pairs = frozenset((t[i], t[j]) for t in allowed)
                    arcs.append(_Arc(part.scope[i], part.scope[j], lambda a, b, pairs=pairs: (a, b) in pairs))
    return arcs, unary


def enforce_ac_binary(csp, ds):
    """
    Arc consistency on the binary decomposition (AC-3 style fixpoint)

    Returns:
        the largest arc-consistent sub-state of ds, wiped out on failure
    """
    arcs, unary = binary_arcs(csp)
    domains = {name: set(vals) for name, vals in ds.domains.items()}

    for c in unary:
        domains[c.scope[0]] = {v for v in domains[c.scope[0]] if c.holds((v,))}
    if any(not vals for vals in domains.values()):
        return DomainState.wiped(domains)

    changed = True
    while changed:
        changed = False
        for arc in arcs:
            dy = domains[arc.y]
            unsupported = {a for a in domains[arc.x] if not any(arc.check(a, b) for b in dy)}
            if unsupported:
                domains[arc.x] -= unsupported
                changed = True
                if not domains[arc.x]:
                    return DomainState.wiped(domains)
    return DomainState(domains)


def _hull(vals):
    return range(min(vals), max(vals) + 1)


def _bound_supported(c, pos, value, domains):
    candidates = [[value] if j == pos else _hull(domains[name]) for j, name in enumerate(c.scope)]
    return has_support(c, candidates)


def enforce_bound(csp, ds):
    """
    Bound consistency: trim each variable's min and max until both have a
    bound support (others relaxed to their interval hulls)

    Interior values are never removed.
    """

    def revise(c, domains):
        changed = False
        for pos, name in enumerate(c.scope):
            vals = domains[name]
            while vals and not _bound_supported(c, pos, min(vals), domains):
                vals.discard(min(vals))
                changed = True
            while vals and not _bound_supported(c, pos, max(vals), domains):
                vals.discard(max(vals))
                changed = True
            if not vals:
                return True
        return changed

    return _fixpoint(csp, ds, revise)


def enforce_range(csp, ds):
    """Range consistency: drop every value (interior ones too) without a bound support."""

    def revise(c, domains):
        changed = False
        for pos, name in enumerate(c.scope):
            unsupported = {v for v in domains[name] if not _bound_supported(c, pos, v, domains)}
            if unsupported:
                domains[name] -= unsupported
                changed = True
                if not domains[name]:
                    return True
        return changed

    return _fixpoint(csp, ds, revise)


def enforce_domain(csp, ds):
    """
    Domain (generalized arc) consistency by enumerating satisfying tuples

    Raises:
        OracleTooLargeError when a scope's domain product exceeds the guard
    """

    def revise(c, domains):
        _search_guard([domains[name] for name in c.scope])
        changed = False
        for pos, name in enumerate(c.scope):
            unsupported = set()
            for v in domains[name]:
                candidates = [[v] if j == pos else sorted(domains[other]) for j, other in enumerate(c.scope)]
                if not has_support(c, candidates):
                    unsupported.add(v)
            if unsupported:
                domains[name] -= unsupported
                changed = True
                if not domains[name]:
                    return True
        return changed

    return _fixpoint(csp, ds, revise)


def hall_intervals(ds, variables):
    """
    Every interval [l,u] that contains the domains of exactly u-l+1 variables

    Args:
        ds: DomainState
        variables: the variables to count (e.g. an all-different scope)
    """
    present = [ds[v] for v in variables if ds[v]]
    if not present:
        return []
    lo = min(min(vals) for vals in present)
    hi = max(max(vals) for vals in present)

    found = []
    for l in range(lo, hi + 1):
        for u in range(l, hi + 1):
            members = frozenset(v for v in variables if ds[v] and l <= min(ds[v]) and max(ds[v]) <= u)
            if len(members) == u - l + 1:
                found.append(HallInterval(l, u, members))
    return found
