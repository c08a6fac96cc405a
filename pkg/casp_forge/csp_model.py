"""
Finite-domain CSP data model
Variables, extensional and global constraints, assignment evaluation,
binary decomposition of all-different and domain normalization
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    ArityMismatchError,
    DegenerateScopeError,
    DomainViolationError,
    EmptyDomainError,
    IncompleteAssignmentError,
    NoExtensionalFormError,
    UnknownVariableError,
)

ALLOWED = "allowed"
FORBIDDEN = "forbidden"
NOT_EQUAL = "neq"
ALL_DIFFERENT = "alldiff"
CONSTRAINT_KINDS = (ALLOWED, FORBIDDEN, NOT_EQUAL, ALL_DIFFERENT)

# complementing a relation is refused above this many tuples
MAX_PRODUCT = 10**6

Assignment = Mapping[str, int]


@dataclass(frozen=True)
class VariableDecl:
    name: str
    domain: frozenset

    def __post_init__(self):
        object.__setattr__(self, "domain", frozenset(int(v) for v in self.domain))
        if not self.domain:
            raise EmptyDomainError(self.name)

    @property
    def lo(self):
        return min(self.domain)

    @property
    def hi(self):
        return max(self.domain)

    @property
    def is_interval(self):
        return len(self.domain) == self.hi - self.lo + 1


@dataclass(frozen=True)
class Constraint:
    """
    A constraint over an ordered scope

    Extensional kinds carry their tuple set; neq and alldiff are predicates.
    `lowering="direct"` asks every encoding to emit forbidden-tuple rules
    over value atoms for this constraint.
    """

    id: str
    scope: tuple
    kind: str
    tuples: frozenset = frozenset()
    required: bool = True
    lowering: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "tuples", frozenset(tuple(int(v) for v in t) for t in self.tuples))
        if self.kind not in CONSTRAINT_KINDS:
            raise ValueError(f"unknown constraint kind: {self.kind}")
        if len(set(self.scope)) != len(self.scope):
            raise DegenerateScopeError(self.id, len(self.scope), "repeats a variable")
        if self.kind == NOT_EQUAL and len(self.scope) != 2:
            raise ArityMismatchError(self.id, 2, len(self.scope))
        for t in self.tuples:
            if len(t) != len(self.scope):
                raise ArityMismatchError(self.id, len(self.scope), len(t))
        if self.lowering not in (None, "direct"):
            raise ValueError(f"unknown lowering: {self.lowering}")

    @property
    def is_extensional(self):
        return self.kind in (ALLOWED, FORBIDDEN)

    def holds(self, values):
        """Whether the value tuple (in scope order) is in the relation."""
        values = tuple(values)
        if self.kind == ALLOWED:
            return values in self.tuples
        if self.kind == FORBIDDEN:
            return values not in self.tuples
        if self.kind == NOT_EQUAL:
            return values[0] != values[1]
        return len(set(values)) == len(values)

    def forbidden_tuples(self, domains):
        """
        Tuples over the given per-position value sets that violate the constraint

        Args:
            domains: one iterable of values per scope position
        """
        domains = [sorted(d) for d in domains]
        if self.kind == FORBIDDEN:
            return sorted(t for t in self.tuples if all(v in d for v, d in zip(t, domains)))
        if self.kind == NOT_EQUAL:
            common = sorted(set(domains[0]) & set(domains[1]))
            return [(i, i) for i in common]
        _check_product(self.id, domains)
        return [t for t in itertools.product(*domains) if not self.holds(t)]

    def allowed_tuples(self, domains):
        """Tuples over the given per-position value sets that satisfy the constraint."""
        domains = [sorted(d) for d in domains]
        if self.kind == ALLOWED:
            return sorted(t for t in self.tuples if all(v in d for v, d in zip(t, domains)))
        _check_product(self.id, domains)
        return [t for t in itertools.product(*domains) if self.holds(t)]


def _check_product(constraint_id, domains):
    size = math.prod(len(d) for d in domains)
    if size > MAX_PRODUCT:
        raise NoExtensionalFormError(f"{constraint_id} (domain product {size} > {MAX_PRODUCT})")


def complement(c, domains):
    """
    Convert an extensional constraint to the other extensional kind

    Args:
        c: allowed or forbidden constraint
        domains: one value set per scope position
    """
    if c.kind == ALLOWED:
        return Constraint(c.id, c.scope, FORBIDDEN, frozenset(c.forbidden_tuples(domains)), c.required, c.lowering)
    if c.kind == FORBIDDEN:
        return Constraint(c.id, c.scope, ALLOWED, frozenset(c.allowed_tuples(domains)), c.required, c.lowering)
    raise NoExtensionalFormError(c.id)


@dataclass(frozen=True)
class CspInstance:
    variables: tuple
    constraints: tuple = ()
    _by_name: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        by_name = {}
        for decl in self.variables:
            if decl.name in by_name:
                raise ValueError(f"duplicate variable: {decl.name}")
            by_name[decl.name] = decl
        object.__setattr__(self, "_by_name", by_name)
        seen = set()
        for c in self.constraints:
            if c.id in seen:
                raise ValueError(f"duplicate constraint id: {c.id}")
            seen.add(c.id)
            for name in c.scope:
                if name not in by_name:
                    raise UnknownVariableError(name, c.id)

    @property
    def names(self):
        return tuple(decl.name for decl in self.variables)

    @property
    def max_value(self):
        """d: the largest declared value (after normalization, the top of [1,d])."""
        return max(decl.hi for decl in self.variables) if self.variables else 0

    def variable(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownVariableError(name)

    def domain(self, name):
        return self.variable(name).domain

    def scope_domains(self, c):
        return [self.domain(name) for name in c.scope]


@dataclass(frozen=True)
class Evaluation:
    satisfied: frozenset
    is_solution: bool


def evaluate(csp, a):
    """
    Check a total assignment against every constraint

    Returns:
        Evaluation with the ids of the satisfied constraints
    """
    missing = [name for name in csp.names if name not in a]
    if missing:
        raise IncompleteAssignmentError(missing)
    for decl in csp.variables:
        if a[decl.name] not in decl.domain:
            raise DomainViolationError(decl.name, a[decl.name])

    satisfied = frozenset(c.id for c in csp.constraints if c.holds(a[name] for name in c.scope))
    return Evaluation(satisfied, len(satisfied) == len(csp.constraints))


def binary_decomposition(c):
    """
    Replace all-different over n variables by its n(n-1)/2 disequalities

    Derived ids are `<id>_<i>_<j>` with 0-based scope positions i < j.
    """
    if c.kind != ALL_DIFFERENT:
        raise ValueError(f"{c.id} is not an all-different constraint")
    if len(c.scope) < 2:
        raise DegenerateScopeError(c.id, len(c.scope))
    return [
        Constraint(f"{c.id}_{i}_{j}", (c.scope[i], c.scope[j]), NOT_EQUAL, required=c.required, lowering=c.lowering)
        for i, j in itertools.combinations(range(len(c.scope)), 2)
    ]


@dataclass(frozen=True)
class Normalization:
    normalized: CspInstance
    value_maps: dict
    # shared renaming of the union of all domains, original -> [1,d]
    renaming: dict

    def normalize_assignment(self, a):
        return {name: self.value_maps[name][value] for name, value in a.items()}

    def denormalize_assignment(self, a):
        inverse = {name: {new: old for old, new in mapping.items()} for name, mapping in self.value_maps.items()}
        return {name: inverse[name][value] for name, value in a.items()}


def normalize(csp):
    """
    Rename all values onto [1,d] with one order-preserving map

    The union of the declared domains is ranked, so holes inside a variable's
    domain survive the renaming. Constraint tuples are rewritten through the
    same map; tuples mentioning values outside every domain are dropped.
    """
    for decl in csp.variables:
        if not decl.domain:
            raise EmptyDomainError(decl.name)

    values = sorted(set().union(*(decl.domain for decl in csp.variables))) if csp.variables else []
    renaming = {old: new for new, old in enumerate(values, start=1)}

    variables = [VariableDecl(decl.name, frozenset(renaming[v] for v in decl.domain)) for decl in csp.variables]
    value_maps = {decl.name: {v: renaming[v] for v in sorted(decl.domain)} for decl in csp.variables}

    constraints = []
    for c in csp.constraints:
        if c.is_extensional:
            tuples = frozenset(
                tuple(renaming[v] for v in t) for t in c.tuples if all(v in renaming for v in t)
            )
            c = Constraint(c.id, c.scope, c.kind, tuples, c.required, c.lowering)
        constraints.append(c)

    return Normalization(CspInstance(tuple(variables), tuple(constraints)), value_maps, renaming)
