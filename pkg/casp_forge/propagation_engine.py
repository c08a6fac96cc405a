"""
Nogood store and unit propagation
Compiles a tight ground program into completion nogoods plus native
cardinality counters and propagates them with two watched literals.
Also maps DomainState to literal assumptions and back per encoding.
"""

import logging
from dataclasses import dataclass, field

from .asp_program import BOTTOM, CARDINALITY, CHOICE, Atom
from .consistency_oracles import DomainState
from .encoders import BOUND, RANGE, encode
from .errors import NotTightError

logger = logging.getLogger(__name__)

FIXPOINT = "fixpoint"
CONFLICT = "conflict"

# auxiliary atoms standing for rule bodies
BODY = "_body"

# value vocabularies read by the smallest-domain heuristic, in preference order
_GROUP_VOCABULARY = ("b", "r", "e")


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def complement(self):
        return Literal(self.atom, not self.positive)

    def __str__(self):
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True)
class Cardinality:
    """head <-> at least `bound` of `literals` hold (head is a positive variable)"""

    bound: int
    literals: tuple
    head: int


@dataclass(frozen=True)
class CompiledStore:
    """
    Immutable compilation result

    Variables are 1..size, atoms[v - 1] names variable v; a literal is +v or -v.
    `groups` lists, per CSP variable, its value atoms as (value, variable)
    pairs together with the vocabulary letter.
    """

    atoms: tuple
    nogoods: tuple
    cards: tuple
    groups: dict
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {atom: v for v, atom in enumerate(self.atoms, start=1)})

    @property
    def size(self):
        return len(self.atoms)

    def var(self, atom):
        return self._index[atom]

    def encode_literal(self, literal):
        v = self.var(literal.atom)
        return v if literal.positive else -v

    def decode_literal(self, lit):
        return Literal(self.atoms[abs(lit) - 1], lit > 0)


class _Compiler:
    def __init__(self, program):
        self.atoms = list(program.atoms)
        self.index = {atom: v for v, atom in enumerate(self.atoms, start=1)}
        self.nogoods = []
        self.cards = []
        self.bodies = {}

    def fresh(self):
        self.atoms.append(Atom(BODY, (len(self.atoms) - len(self.index),)))
        return len(self.atoms)

    def literals(self, rule):
        return [self.index[a] for a in rule.body_pos] + [-self.index[a] for a in rule.body_neg]

    def nogood(self, lits):
        lits = list(dict.fromkeys(lits))
        if any(-lit in lits for lit in lits):
            return
        self.nogoods.append(tuple(lits))

    def body(self, lits):
        """A literal equivalent to the conjunction, None for the empty body."""
        lits = tuple(dict.fromkeys(lits))
        if not lits:
            return None
        if len(lits) == 1:
            return lits[0]
        key = frozenset(lits)
        if key in self.bodies:
            return self.bodies[key]
        beta = self.fresh()
        self.bodies[key] = beta
        for lit in lits:
            self.nogood((beta, -lit))
        self.nogood((-beta, *lits))
        return beta

    def card(self, rule):
        """Literal for a cardinality body; True/False when the bound decides it."""
        lits = self.literals(rule)
        if rule.bound <= 0:
            return True
        if rule.bound > len(lits):
            return False
        beta = self.fresh()
        self.cards.append(Cardinality(rule.bound, tuple(lits), beta))
        return beta


def compile_program(p):
    """
    Completion nogoods and cardinality counters for a tight program

    Raises:
        NotTightError when the positive dependency graph has a cycle
    """
    if not p.is_tight:
        raise NotTightError()
    comp = _Compiler(p)
    supports = {atom: [] for atom in p.atoms}
    free = set()

    for rule in p.rules:
        if rule.kind == CARDINALITY:
            beta = comp.card(rule)
        else:
            beta = comp.body(comp.literals(rule))
        if rule.is_integrity:
            if beta is False:
                continue
            if beta is None or beta is True:
                comp.nogood((-comp.index[BOTTOM],))
            else:
                comp.nogood((beta,))
            continue
        if rule.kind == CHOICE:
            for head in rule.head:
                if beta is None or beta is True:
                    free.add(head)
                elif beta is not False:
                    supports[head].append(beta)
            continue
        if beta is not False:
            supports[rule.head[0]].append(True if beta is None else beta)

    for atom in p.atoms:
        a = comp.index[atom]
        bodies = supports[atom]
        for beta in bodies:
            if beta is True:
                comp.nogood((-a,))
            else:
                comp.nogood((beta, -a))
        if atom in free or True in bodies:
            continue
        comp.nogood((a, *(-beta for beta in bodies)))

    groups = _value_groups(p.atoms, comp.index)
    logger.debug("compiled %d atoms into %d nogoods and %d counters", len(comp.atoms), len(comp.nogoods), len(comp.cards))
    return CompiledStore(tuple(comp.atoms), tuple(comp.nogoods), tuple(comp.cards), groups)


def _value_groups(atoms, index):
    found = {}
    for atom in atoms:
        if atom.name in ("e", "b") and len(atom.args) == 2:
            name, value = atom.args
        elif atom.name == "r" and len(atom.args) == 3 and atom.args[1] == atom.args[2]:
            name, value = atom.args[0], atom.args[1]
        else:
            continue
        found.setdefault(name, {}).setdefault(atom.name, []).append((value, index[atom]))
    groups = {}
    for name, vocabularies in found.items():
        letter = next(v for v in _GROUP_VOCABULARY if v in vocabularies)
        groups[name] = (letter, tuple(sorted(vocabularies[letter])))
    return groups


class _Nogood:
    __slots__ = ("lits", "learned", "activity", "deleted")

    def __init__(self, lits, learned=False):
        self.lits = list(lits)
        self.learned = learned
        self.activity = 0.0
        self.deleted = False


def reason_literals(reason):
    return reason.lits if isinstance(reason, _Nogood) else reason


class Propagator:
    """
    Mutable assignment over a CompiledStore

    Nogoods watch two literals and wake up when a watched literal becomes
    true; cardinality counters track true/false members on every
    assignment. The CDNL solver drives the same object.
    """

    def __init__(self, store):
        self.store = store
        n = store.size
        self.value = [None] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.propagations = 0
        self.watches = {lit: [] for v in range(1, n + 1) for lit in (v, -v)}
        self.card_true = [0] * len(store.cards)
        self.card_false = [0] * len(store.cards)
        self.card_members = [[] for _ in range(n + 1)]
        self.card_touch = [[] for _ in range(n + 1)]
        for ci, card in enumerate(store.cards):
            for lit in card.literals:
                self.card_members[abs(lit)].append((ci, lit))
                self.card_touch[abs(lit)].append(ci)
            self.card_touch[card.head].append(ci)
        self.card_touch = [list(dict.fromkeys(cis)) for cis in self.card_touch]

        self.root_conflict = None
        units = []
        for lits in store.nogoods:
            if len(lits) == 1:
                units.append(_Nogood(lits))
            else:
                self.attach(_Nogood(lits))
        for ng in units:
            lit = ng.lits[0]
            current = self.lit_value(lit)
            if current is True:
                self.root_conflict = ng
                break
            if current is None:
                self.assign(-lit, ng)

    @property
    def decision_level(self):
        return len(self.trail_lim)

    def lit_value(self, lit):
        v = self.value[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def attach(self, ng):
        self.watches[ng.lits[0]].append(ng)
        self.watches[ng.lits[1]].append(ng)

    def assign(self, lit, reason=None):
        var = abs(lit)
        self.value[var] = lit > 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        for ci, member in self.card_members[var]:
            if member == lit:
                self.card_true[ci] += 1
            else:
                self.card_false[ci] += 1

    def new_level(self):
        self.trail_lim.append(len(self.trail))

    def backjump(self, level):
        """Undo every assignment above `level`; returns the freed variables."""
        if level >= len(self.trail_lim):
            return []
        start = self.trail_lim[level]
        freed = []
        for lit in reversed(self.trail[start:]):
            var = abs(lit)
            for ci, member in self.card_members[var]:
                if member == lit:
                    self.card_true[ci] -= 1
                else:
                    self.card_false[ci] -= 1
            self.value[var] = None
            self.reason[var] = None
            freed.append(var)
        del self.trail[start:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)
        return freed

    def propagate(self):
        """Run to fixpoint; returns the violated nogood (as reason) or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            conflict = self._wake_nogoods(lit)
            if conflict is not None:
                return conflict
            for ci in self.card_touch[abs(lit)]:
                conflict = self._check_card(ci)
                if conflict is not None:
                    return conflict
        return None

    def _wake_nogoods(self, lit):
        watching = self.watches[lit]
        kept = []
        conflict = None
        i = 0
        while i < len(watching):
            ng = watching[i]
            i += 1
            if ng.deleted:
                continue
            lits = ng.lits
            if lits[0] == lit:
                lits[0], lits[1] = lits[1], lits[0]
            other = lits[0]
            other_value = self.lit_value(other)
            if other_value is False:
                kept.append(ng)
                continue
            for j in range(2, len(lits)):
                if self.lit_value(lits[j]) is not True:
                    lits[1], lits[j] = lits[j], lits[1]
                    self.watches[lits[1]].append(ng)
                    break
            else:
                kept.append(ng)
                if other_value is True:
                    kept.extend(watching[i:])
                    conflict = ng
                    break
                self.assign(-other, ng)
        self.watches[lit] = kept
        return conflict

    def _check_card(self, ci):
        card = self.store.cards[ci]
        k, lits, head = card.bound, card.literals, card.head
        n = len(lits)
        t, f = self.card_true[ci], self.card_false[ci]
        head_value = self.lit_value(head)

        if t >= k:
            trues = tuple(m for m in lits if self.lit_value(m) is True)[:k]
            if head_value is False:
                return (-head, *trues)
            if head_value is None:
                self.assign(head, (-head, *trues))
        elif n - f < k:
            falses = tuple(-m for m in lits if self.lit_value(m) is False)[: n - k + 1]
            if head_value is True:
                return (head, *falses)
            if head_value is None:
                self.assign(-head, (head, *falses))

        head_value = self.lit_value(head)
        if head_value is True and n - f == k and t < k:
            falses = tuple(-m for m in lits if self.lit_value(m) is False)
            for m in lits:
                if self.lit_value(m) is None:
                    self.assign(m, (head, -m, *falses))
        elif head_value is False and t == k - 1:
            trues = tuple(m for m in lits if self.lit_value(m) is True)
            for m in lits:
                if self.lit_value(m) is None:
                    self.assign(-m, (-head, m, *trues))
        return None


@dataclass(frozen=True)
class PropagationOutcome:
    """
    status is "fixpoint" or "conflict"; assignment maps every atom of the
    store to True, False or None; trail holds (Literal, reason) pairs with
    reason None for assumptions and a tuple of Literals otherwise.
    """

    status: str
    assignment: dict
    trail: tuple
    conflict: tuple | None = None

    def value(self, atom):
        return self.assignment.get(atom)


def _outcome(store, prop, status, conflict=None):
    assignment = {atom: prop.value[v] for v, atom in enumerate(store.atoms, start=1)}
    trail = []
    for lit in prop.trail:
        reason = prop.reason[abs(lit)]
        decoded = None if reason is None else tuple(store.decode_literal(x) for x in reason_literals(reason))
        trail.append((store.decode_literal(lit), decoded))
    if conflict is not None:
        conflict = tuple(store.decode_literal(x) for x in reason_literals(conflict))
    return PropagationOutcome(status, assignment, tuple(trail), conflict)


def unit_propagate(store, assumptions=()):
    """
    Unit propagation from the store's facts plus `assumptions` (Literals)

    Contradictory assumptions end in a conflict outcome, not an exception.
    """
    prop = Propagator(store)
    if prop.root_conflict is not None:
        return _outcome(store, prop, CONFLICT, prop.root_conflict)
    for literal in assumptions:
        lit = store.encode_literal(literal)
        current = prop.lit_value(lit)
        if current is False:
            return _outcome(store, prop, CONFLICT, (lit, -lit))
        if current is None:
            prop.assign(lit)
    conflict = prop.propagate()
    if conflict is not None:
        return _outcome(store, prop, CONFLICT, conflict)
    return _outcome(store, prop, FIXPOINT)


def _false(atom):
    return Literal(atom, False)


def inject_domains(ds, kind, csp):
    """Literals pinning the encoding's atoms to the current domains in ds."""
    d = csp.max_value
    literals = []
    for name in csp.names:
        present = ds[name]
        lo, hi = min(present), max(present)
        if kind.name == BOUND:
            if lo > 1:
                literals.append(_false(Atom("b", (name, lo - 1))))
            literals.append(Literal(Atom("b", (name, hi))))
        elif kind.name == RANGE:
            if lo > 1:
                literals.append(_false(Atom("r", (name, 1, lo - 1))))
            if hi < d:
                literals.append(_false(Atom("r", (name, hi + 1, d))))
            literals.extend(_false(Atom("r", (name, i, i))) for i in range(lo + 1, hi) if i not in present)
        else:
            literals.extend(_false(Atom("e", (name, i))) for i in range(1, d + 1) if i not in present)
    return literals


def extract_domains(out, kind, csp):
    """Read the domains left open by a propagation outcome; conflicts wipe out."""
    if out.status == CONFLICT:
        return DomainState.wiped(csp.names)
    d = csp.max_value
    domains = {}
    for decl in csp.variables:
        name = decl.name
        if kind.name == BOUND:
            falses = [i for i in range(1, d + 1) if out.value(Atom("b", (name, i))) is False]
            trues = [i for i in range(1, d + 1) if out.value(Atom("b", (name, i))) is True]
            lo = max(falses, default=0) + 1
            hi = min(trues, default=d)
            values = set(range(lo, hi + 1))
        elif kind.name == RANGE:
            values = {i for i in range(1, d + 1) if out.value(Atom("r", (name, i, i))) is not False}
            for j in range(1, d + 1):
                if out.value(Atom("r", (name, 1, j))) is False:
                    values -= set(range(1, j + 1))
                if out.value(Atom("r", (name, j, d))) is False:
                    values -= set(range(j, d + 1))
        else:
            values = {i for i in range(1, d + 1) if out.value(Atom("e", (name, i))) is not False}
        domains[name] = values & decl.domain
    return DomainState(domains).canonical()


def propagate_encoding(csp, ds, kind, regions="maximal"):
    """
    encode, compile, unit-propagate the injected domains and read them back

    The result never exceeds ds; any wipe-out is returned in canonical form.
    """
    if ds.wiped_out:
        return ds.canonical()
    # encoding against ds keeps holes out of bound-encoded domains
    store = compile_program(encode(csp, kind, ds, regions))
    out = unit_propagate(store, inject_domains(ds, kind, csp))
    result = extract_domains(out, kind, csp)
    if result.wiped_out:
        return result
    return DomainState({name: result[name] & ds[name] for name in csp.names}).canonical()
