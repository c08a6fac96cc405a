"""
Ground logic programs
Normal, choice and cardinality rules over an interned atom table, with
reduct-based answer-set checking, elimination of extended rules and a
brute-force answer-set enumerator used as the semantic oracle.
"""

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from .errors import OracleTooLargeError, UntransformedProgramError

NORMAL = "normal"
CHOICE = "choice"
CARDINALITY = "cardinality"

# enumerate_answer_sets guesses over at most this many original atoms
MAX_GUESS_ATOMS = 22

# fresh atoms introduced by transform_extended
CHOICE_COMPLEMENT = "_chc"
LITERAL_COMPLEMENT = "_cmp"
COUNTER = "_cnt"


@dataclass(frozen=True, order=True)
class Atom:
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"

    @property
    def is_fresh(self):
        return self.name in (CHOICE_COMPLEMENT, LITERAL_COMPLEMENT, COUNTER)


BOTTOM = Atom("_bottom")


@dataclass(frozen=True)
class Rule:
    kind: str
    head: tuple
    body_pos: tuple = ()
    body_neg: tuple = ()
    bound: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body_pos", tuple(self.body_pos))
        object.__setattr__(self, "body_neg", tuple(self.body_neg))
        if self.kind == NORMAL:
            if len(self.head) != 1 or self.bound is not None:
                raise ValueError("a normal rule has one head atom and no bound")
        elif self.kind == CHOICE:
            if not self.head or self.bound is not None or BOTTOM in self.head:
                raise ValueError("a choice rule needs a non-empty head without the bottom atom")
        elif self.kind == CARDINALITY:
            # a bound above the literal count is kept: such a rule never fires
            if len(self.head) != 1 or self.bound is None or self.bound < 0:
                raise ValueError("a cardinality rule has one head atom and a bound >= 0")
        else:
            raise ValueError(f"unknown rule kind: {self.kind}")

    @classmethod
    def normal(cls, head, pos=(), neg=()):
        return cls(NORMAL, (head,), pos, neg)

    @classmethod
    def integrity(cls, pos=(), neg=()):
        return cls(NORMAL, (BOTTOM,), pos, neg)

    @classmethod
    def choice(cls, heads, pos=(), neg=()):
        return cls(CHOICE, heads, pos, neg)

    @classmethod
    def cardinality(cls, head, bound, pos=(), neg=()):
        return cls(CARDINALITY, (head,), pos, neg, bound)

    @property
    def is_integrity(self):
        return self.head == (BOTTOM,)

    def atoms(self):
        return (*self.head, *self.body_pos, *self.body_neg)


@dataclass(frozen=True)
class GroundProgram:
    atoms: tuple
    rules: tuple
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _tight: bool = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "rules", tuple(self.rules))
        index = {atom: i for i, atom in enumerate(self.atoms)}
        for rule in self.rules:
            for atom in rule.atoms():
                if atom not in index:
                    raise ValueError(f"atom {atom} is missing from the atom table")
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_tight", _is_tight(self.rules))

    @property
    def is_tight(self):
        return self._tight

    @property
    def integrity_rules(self):
        return tuple(rule for rule in self.rules if rule.is_integrity)

    def __contains__(self, atom):
        return atom in self._index

    def index(self, atom):
        return self._index[atom]


def _is_tight(rules):
    """No cycle through positive bodies among atoms defined by normal or cardinality rules."""
    defined = {rule.head[0] for rule in rules if rule.kind != CHOICE and not rule.is_integrity}
    graph = {atom: set() for atom in defined}
    for rule in rules:
        if rule.kind == CHOICE or rule.is_integrity:
            continue
        graph[rule.head[0]].update(a for a in rule.body_pos if a in defined)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError:
        return False
    return True


class ProgramBuilder:
    """Accumulates rules and interns atoms in first-seen order."""

    def __init__(self):
        self._atoms = {BOTTOM: None}
        self._rules = []

    def atom(self, name, *args):
        atom = Atom(name, tuple(args))
        self._atoms.setdefault(atom, None)
        return atom

    def declare(self, atom):
        self._atoms.setdefault(atom, None)
        return atom

    def add(self, rule):
        for atom in rule.atoms():
            self._atoms.setdefault(atom, None)
        self._rules.append(rule)
        return rule

    def extend(self, rules):
        for rule in rules:
            self.add(rule)

    def __len__(self):
        return len(self._rules)

    def build(self):
        return GroundProgram(tuple(self._atoms), tuple(self._rules))


def _least_model(rules):
    """
    Least model of a positive program by forward chaining

    Cardinality rules are read positively: head once `bound` body atoms hold.
    """
    waiting = {}
    missing = []
    model = set()
    queue = []
    for i, rule in enumerate(rules):
        need = len(set(rule.body_pos)) if rule.kind == NORMAL else rule.bound
        missing.append(need)
        for atom in set(rule.body_pos):
            waiting.setdefault(atom, []).append(i)
        if need <= 0:
            queue.append(rule.head[0])
    while queue:
        atom = queue.pop()
        if atom in model:
            continue
        model.add(atom)
        for i in waiting.get(atom, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(rules[i].head[0])
    return frozenset(model)


def reduct(p, x):
    """
    Positive program keeping `head <- body+` for rules whose negative body misses x

    Raises:
        UntransformedProgramError for choice or cardinality rules
    """
    x = frozenset(x)
    kept = []
    for rule in p.rules:
        if rule.kind != NORMAL:
            raise UntransformedProgramError(rule.kind)
        if not x.intersection(rule.body_neg):
            kept.append(Rule.normal(rule.head[0], rule.body_pos))
    return GroundProgram(p.atoms, tuple(kept))


def least_model(p):
    return _least_model(p.rules)


def is_answer_set(p, x):
    """Whether x is the least model of reduct(p, x) and omits the bottom atom."""
    x = frozenset(x)
    if BOTTOM in x:
        return False
    return least_model(reduct(p, x)) == x


def transform_extended(p):
    """
    Eliminate choice and cardinality rules

    A choice rule {h1..hk} <- B becomes hi <- B, not hi' and hi' <- not hi.
    A cardinality rule h <- k{L} becomes a counter ladder whose atom
    cnt(j,m) holds when at least m of the first j literals of L hold;
    negative literals enter through complement atoms c <- not b.
    Fresh atom names are derived from the rule index.
    """
    builder = ProgramBuilder()
    for atom in p.atoms:
        builder.declare(atom)

    for r, rule in enumerate(p.rules):
        if rule.kind == NORMAL:
            builder.add(rule)
        elif rule.kind == CHOICE:
            for i, head in enumerate(rule.head):
                comp = builder.atom(CHOICE_COMPLEMENT, r, i)
                builder.add(Rule.normal(head, rule.body_pos, (*rule.body_neg, comp)))
                builder.add(Rule.normal(comp, (), (head,)))
        else:
            _add_ladder(builder, r, rule)
    return builder.build()


def _add_ladder(builder, r, rule):
    head, k = rule.head[0], rule.bound
    if k == 0:
        builder.add(Rule.normal(head))
        return

    literals = list(rule.body_pos)
    for j, atom in enumerate(rule.body_neg, start=len(rule.body_pos) + 1):
        comp = builder.atom(LITERAL_COMPLEMENT, r, j)
        builder.add(Rule.normal(comp, (), (atom,)))
        literals.append(comp)

    n = len(literals)
    if k > n:
        return
    for j in range(1, n + 1):
        lit = literals[j - 1]
        for m in range(1, min(j, k) + 1):
            cnt = builder.atom(COUNTER, r, j, m)
            if m <= j - 1:
                builder.add(Rule.normal(cnt, (Atom(COUNTER, (r, j - 1, m)),)))
            if m == 1:
                builder.add(Rule.normal(cnt, (lit,)))
            else:
                builder.add(Rule.normal(cnt, (Atom(COUNTER, (r, j - 1, m - 1)), lit)))
    builder.add(Rule.normal(head, (Atom(COUNTER, (r, n, k)),)))


def lift_interpretation(p, t, x):
    """
    Extend an interpretation of p to the fresh atoms of t = transform_extended(p)

    Complement atoms take the opposite truth value of their source atom and
    counters follow by forward chaining.
    """
    x = frozenset(x)
    guess = set(x)
    for rule in t.rules:
        head = rule.head[0]
        if head.name in (CHOICE_COMPLEMENT, LITERAL_COMPLEMENT) and rule.body_neg[0] not in x:
            guess.add(head)
    return least_model(reduct(t, guess))


def is_answer_set_extended(p, x):
    """is_answer_set on transform_extended(p) after lifting x to the fresh atoms."""
    x = frozenset(x)
    if BOTTOM in x:
        return False
    t = transform_extended(p)
    lifted = lift_interpretation(p, t, x)
    return lifted.intersection(p.atoms) == x and is_answer_set(t, lifted)


def is_extended_answer_set(p, x):
    """
    Answer-set test straight from the definition for choice and cardinality rules

    The reduct keeps `h <- B+` for chosen heads h in x, and turns
    `h <- k{L}` into `h <- k'{L+}` with k' = k minus the negative literals
    satisfied by x.
    """
    x = frozenset(x)
    if BOTTOM in x:
        return False
    positive = []
    for rule in p.rules:
        if rule.kind == CARDINALITY:
            satisfied_neg = sum(1 for atom in rule.body_neg if atom not in x)
            positive.append(Rule.cardinality(rule.head[0], max(0, rule.bound - satisfied_neg), rule.body_pos))
        elif x.intersection(rule.body_neg):
            continue
        elif rule.kind == CHOICE:
            positive.extend(Rule.normal(h, rule.body_pos) for h in rule.head if h in x)
        else:
            positive.append(Rule.normal(rule.head[0], rule.body_pos))
    return _least_model(positive) == x


def enumerate_answer_sets(p, projection=None, max_atoms=MAX_GUESS_ATOMS):
    """
    All answer sets of p projected onto `projection`

    Guesses the truth of atoms under default negation in the transformed
    program, pruning with the least models of the rules that certainly
    apply (lower bound) and that may still apply (upper bound).

    Args:
        p: ground program (extended rules allowed)
        projection: atoms to keep, defaults to p's atoms without bottom
        max_atoms: guard on the number of original atoms to guess over;
            fresh atoms of the transformation follow from them and are not counted
    """
    projection = frozenset(p.atoms) - {BOTTOM} if projection is None else frozenset(projection)
    t = transform_extended(p)
    original = frozenset(p.atoms)

    negative = []
    for rule in t.rules:
        for atom in rule.body_neg:
            if atom not in negative:
                negative.append(atom)
    negative.sort(key=lambda atom: atom not in original)
    guessed_original = sum(1 for atom in negative if atom in original)
    if guessed_original > max_atoms:
        raise OracleTooLargeError(f"2^{guessed_original} guesses", f"2^{max_atoms}")

    rules = t.rules
    found = set()

    def bounds(in_set, out_set):
        lower = _least_model([r for r in rules if out_set.issuperset(r.body_neg)])
        upper = _least_model([r for r in rules if not in_set.intersection(r.body_neg)])
        return lower, upper

    def search(in_set, out_set, undecided):
        while True:
            lower, upper = bounds(in_set, out_set)
            if BOTTOM in lower or not in_set <= upper or lower & out_set:
                return
            forced_in = [a for a in undecided if a in lower]
            forced_out = [a for a in undecided if a not in upper]
            if not forced_in and not forced_out:
                break
            in_set = in_set | set(forced_in)
            out_set = out_set | set(forced_out)
            undecided = [a for a in undecided if a not in in_set and a not in out_set]
        if not undecided:
            found.add(lower & projection)
            return
        atom, rest = undecided[0], undecided[1:]
        search(in_set | {atom}, out_set, rest)
        search(in_set, out_set | {atom}, rest)

    search(frozenset(), frozenset(), negative)
    return found
