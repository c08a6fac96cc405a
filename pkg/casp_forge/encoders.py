"""
CSP to ground logic program encoders
Direct, support, bound and range encodings with the all-different
specializations and the Hall bound k of B_k / R_k.
All encoders expect a normalized instance (values inside [1,d]).
"""

import itertools
import logging
import re
from dataclasses import dataclass

from .asp_program import BOTTOM, Atom, ProgramBuilder, Rule
from .consistency_oracles import DomainState
from .csp_model import ALL_DIFFERENT, ALLOWED, NOT_EQUAL, binary_decomposition
from .errors import NoExtensionalFormError, RegionBlowUpError

logger = logging.getLogger(__name__)

DIRECT = "direct"
SUPPORT = "support"
BOUND = "bound"
RANGE = "range"
ENCODINGS = (DIRECT, SUPPORT, BOUND, RANGE)
_LETTERS = {"D": DIRECT, "S": SUPPORT, "B": BOUND, "R": RANGE}

REGION_MODES = ("maximal", "greedy", "unit")
# conflict_regions refuses wider scopes with more forbidden tuples than this
MAX_REGION_TUPLES = 10**4
# full maximal-box enumeration gives up (and falls back to greedy) past this
MAX_BOX_ENUMERATION = 200_000


@dataclass(frozen=True)
class EncodingKind:
    """
    An encoding plus its Hall bound

    hall_bound None means unbounded (k = d); only bound and range use it.
    """

    name: str
    hall_bound: int | None = None

    def __post_init__(self):
        if self.name not in ENCODINGS:
            raise ValueError(f"unknown encoding: {self.name}")
        if self.hall_bound is not None:
            if self.name not in (BOUND, RANGE):
                raise ValueError(f"the {self.name} encoding takes no Hall bound")
            if self.hall_bound < 1:
                raise ValueError("the Hall bound k must be at least 1")

    def k(self, d):
        return d if self.hall_bound is None else min(self.hall_bound, d)

    @property
    def label(self):
        letter = self.name[0].upper()
        return letter if self.hall_bound is None else f"{letter}{self.hall_bound}"

    @classmethod
    def parse(cls, text, hall_bound=None):
        """Accepts S, D, B, R, B3, R1 or the long names (support, bound, ...)."""
        text = text.strip()
        match = re.fullmatch(r"([DSBR])(\d+)?", text)
        if match:
            k = int(match.group(2)) if match.group(2) else hall_bound
            return cls(_LETTERS[match.group(1)], k)
        name = text.lower()
        if name not in ENCODINGS:
            raise ValueError(f"unknown encoding: {text}")
        return cls(name, hall_bound)


class _Vocabulary:
    """Atom constructors bound to one builder."""

    def __init__(self, builder):
        self.builder = builder

    def e(self, v, i):
        return self.builder.atom("e", v, i)

    def b(self, v, i):
        return self.builder.atom("b", v, i)

    def r(self, v, l, u):
        return self.builder.atom("r", v, l, u)

    def sat(self, c):
        return self.builder.atom("sat", c.id)

    def violate(self, c):
        return self.builder.atom("violate", c.id)


def reify(c, builder=None):
    """
    sat(c) <- not violate(c); violate(c) <- not sat(c), plus
    bottom <- violate(c) when the constraint is required
    """
    vocab = _Vocabulary(builder or ProgramBuilder())
    sat, violate = vocab.sat(c), vocab.violate(c)
    rules = [Rule.normal(sat, neg=(violate,)), Rule.normal(violate, neg=(sat,))]
    if c.required:
        rules.append(Rule.integrity((violate,)))
    if builder is not None:
        builder.extend(rules)
    return rules


def _states(csp, ds):
    return DomainState.from_csp(csp) if ds is None else ds


def _value_atom_rules(vocab, csp, ds):
    """Choice, at-least-one and at-most-one value per variable, plus bottom <- e(v,i) for values outside ds."""
    d = csp.max_value
    builder = vocab.builder
    for name in csp.names:
        atoms = [vocab.e(name, i) for i in range(1, d + 1)]
        builder.add(Rule.choice(atoms))
        builder.add(Rule.integrity(neg=atoms))
        builder.add(Rule.cardinality(BOTTOM, 2, atoms))
    for name in csp.names:
        for i in range(1, d + 1):
            if i not in ds[name]:
                builder.add(Rule.integrity((vocab.e(name, i),)))


def _functional_table(c, domains):
    """
    prefix -> last value when an allowed relation of arity >= 3 fixes its
    last position from the others, None otherwise
    """
    if c.kind != ALLOWED or len(c.scope) < 3:
        return None
    table = {}
    for t in c.allowed_tuples(domains):
        if table.setdefault(t[:-1], t[-1]) != t[-1]:
            return None
    return table


def _direct_conflicts(vocab, csp, c):
    """
    violate(c) <- e(v1,d1), ..., e(vn,dn) per forbidden tuple

    A functional relation of arity >= 3 gets one rule per prefix instead:
    violate(c) <- e(v1,d1), ..., e(vn-1,dn-1), not e(vn,f(d1..dn-1)).
    """
    if c.kind == ALL_DIFFERENT:
        for part in binary_decomposition(c):
            _direct_conflicts(vocab, csp, part)
        return
    if not (c.is_extensional or c.kind == NOT_EQUAL):
        raise NoExtensionalFormError(c.id)
    reify(c, vocab.builder)
    violate = vocab.violate(c)
    domains = csp.scope_domains(c)
    table = _functional_table(c, domains)
    if table is not None:
        last = c.scope[-1]
        for prefix in itertools.product(*(sorted(dom) for dom in domains[:-1])):
            pos = [vocab.e(v, i) for v, i in zip(c.scope, prefix)]
            neg = [vocab.e(last, table[prefix])] if prefix in table else []
            vocab.builder.add(Rule.normal(violate, pos, neg))
        return
    for t in c.forbidden_tuples(domains):
        vocab.builder.add(Rule.normal(violate, [vocab.e(v, i) for v, i in zip(c.scope, t)]))


def encode_direct(csp, ds=None):
    """Direct encoding; all-different is lowered to its binary decomposition."""
    ds = _states(csp, ds)
    vocab = _Vocabulary(ProgramBuilder())
    _value_atom_rules(vocab, csp, ds)
    for c in csp.constraints:
        _direct_conflicts(vocab, csp, c)
    return vocab.builder.build()


def encode_support(csp, ds=None):
    """
    Support encoding

    Per ordered scope pair (v, v') and value i: violate(c) <- e(v,i),
    not e(v',i1), ..., not e(v',im) over the supports of v=i in v'.
    all-different gets one rule violate(c) <- 2{e(v1,i), ..., e(vn,i)} per value.
    """
    ds = _states(csp, ds)
    d = csp.max_value
    vocab = _Vocabulary(ProgramBuilder())
    builder = vocab.builder
    _value_atom_rules(vocab, csp, ds)

    for c in csp.constraints:
        if c.lowering == "direct":
            _direct_conflicts(vocab, csp, c)
            continue
        reify(c, builder)
        violate = vocab.violate(c)
        if c.kind == ALL_DIFFERENT:
            for i in range(1, d + 1):
                builder.add(Rule.cardinality(violate, 2, [vocab.e(v, i) for v in c.scope]))
            continue
        if len(c.scope) == 1:
            v = c.scope[0]
            for i in range(1, d + 1):
                if not c.holds((i,)):
                    builder.add(Rule.normal(violate, (vocab.e(v, i),)))
            continue
        allowed = c.allowed_tuples(csp.scope_domains(c))
        for p, q in itertools.permutations(range(len(c.scope)), 2):
            v, w = c.scope[p], c.scope[q]
            for i in range(1, d + 1):
                supports = sorted({t[q] for t in allowed if t[p] == i})
                builder.add(Rule.normal(violate, (vocab.e(v, i),), [vocab.e(w, j) for j in supports]))
    return builder.build()


def _range_variable_rules(vocab, name, d, present):
    """Interval guesses and their nesting constraints for one variable, bottom <- r(v,i,i) for removed values."""
    builder = vocab.builder
    for l in range(1, d + 1):
        for u in range(l, d + 1):
            neg = []
            if l >= 2:
                neg.append(vocab.r(name, 1, l - 1))
            if u <= d - 1:
                neg.append(vocab.r(name, u + 1, d))
            builder.add(Rule.normal(vocab.r(name, l, u), neg=neg))
    for l in range(1, d + 1):
        for u in range(l, d + 1):
            # v in [l,u] implies v in [l-1,u] and v in [l,u+1]
            if l >= 2:
                builder.add(Rule.integrity((vocab.r(name, l, u),), (vocab.r(name, l - 1, u),)))
            if u <= d - 1:
                builder.add(Rule.integrity((vocab.r(name, l, u),), (vocab.r(name, l, u + 1),)))
    for i in range(1, d + 1):
        if i not in present:
            builder.add(Rule.integrity((vocab.r(name, i, i),)))


def _hall_rules(vocab, c, d, k):
    """Hall rules: violate(c) <- u-l+2 {r(v1,l,u), ..., r(vn,l,u)} for intervals of size <= k."""
    violate = vocab.violate(c)
    for l in range(1, d + 1):
        for u in range(l, min(d, l + k - 1) + 1):
            vocab.builder.add(Rule.cardinality(violate, u - l + 2, [vocab.r(v, l, u) for v in c.scope]))


def _box_domains(c, d):
    return [range(1, d + 1)] * len(c.scope)


def _channel(vocab, name, d, kind, channelled):
    """Define e(v,i) from the encoding's own vocabulary, once per variable."""
    if name in channelled:
        return
    channelled.add(name)
    for i in range(1, d + 1):
        if kind == RANGE:
            vocab.builder.add(Rule.normal(vocab.e(name, i), (vocab.r(name, i, i),)))
        elif i == 1:
            vocab.builder.add(Rule.normal(vocab.e(name, 1), (vocab.b(name, 1),)))
        else:
            vocab.builder.add(Rule.normal(vocab.e(name, i), (vocab.b(name, i),), (vocab.b(name, i - 1),)))


def encode_range(csp, ds=None, k=None, regions="maximal"):
    """
    Range encoding with Hall bound k (None: k = d)

    Extensional constraints become one conflict rule per region box;
    all-different gets a Hall rule for every interval of size <= k.
    """
    ds = _states(csp, ds)
    d = csp.max_value
    k = d if k is None else k
    vocab = _Vocabulary(ProgramBuilder())
    builder = vocab.builder
    for name in csp.names:
        _range_variable_rules(vocab, name, d, ds[name])

    channelled = set()
    for c in csp.constraints:
        if c.lowering == "direct":
            for name in c.scope:
                _channel(vocab, name, d, RANGE, channelled)
            _direct_conflicts(vocab, csp, c)
            continue
        reify(c, builder)
        if c.kind == ALL_DIFFERENT:
            _hall_rules(vocab, c, d, k)
            continue
        violate = vocab.violate(c)
        for box in conflict_regions(c, _box_domains(c, d), regions):
            builder.add(Rule.normal(violate, [vocab.r(v, l, u) for v, (l, u) in zip(c.scope, box)]))
    return builder.build()


def _bound_region_rule(vocab, violate, scope, box, d):
    # b(v,d) and b(v,0) are vacuous and left out
    pos = [vocab.b(v, u) for v, (_, u) in zip(scope, box) if u < d]
    neg = [vocab.b(v, l - 1) for v, (l, _) in zip(scope, box) if l >= 2]
    return Rule.normal(violate, pos, neg)


def encode_bound(csp, ds=None, k=None, regions="maximal"):
    """
    Bound encoding with Hall bound k (None: k = d)

    b(v,i) stands for v <= i. all-different links the bounds to range atoms
    through r(v,l,u) <-> b(v,u) and not b(v,l-1) and reuses the Hall rules over them.
    """
    ds = _states(csp, ds)
    d = csp.max_value
    k = d if k is None else k
    vocab = _Vocabulary(ProgramBuilder())
    builder = vocab.builder

    for name in csp.names:
        atoms = [vocab.b(name, i) for i in range(1, d + 1)]
        builder.add(Rule.choice(atoms))
        for i in range(1, d):
            builder.add(Rule.integrity((vocab.b(name, i),), (vocab.b(name, i + 1),)))
        builder.add(Rule.integrity(neg=(vocab.b(name, d),)))
    for name in csp.names:
        present = ds[name]
        lo, hi = min(present), max(present)
        if hi < d:
            builder.add(Rule.integrity(neg=(vocab.b(name, hi),)))
        if lo >= 2:
            builder.add(Rule.integrity((vocab.b(name, lo - 1),)))
        for h in range(lo + 1, hi):
            if h not in present:
                builder.add(Rule.integrity((vocab.b(name, h),), (vocab.b(name, h - 1),)))

    linked = set()
    channelled = set()
    for c in csp.constraints:
        if c.lowering == "direct":
            for name in c.scope:
                _channel(vocab, name, d, BOUND, channelled)
            _direct_conflicts(vocab, csp, c)
            continue
        reify(c, builder)
        violate = vocab.violate(c)
        if c.kind == ALL_DIFFERENT:
            for name in c.scope:
                for l in range(1, d + 1):
                    for u in range(l, min(d, l + k - 1) + 1):
                        if (name, l, u) in linked:
                            continue
                        linked.add((name, l, u))
                        r = vocab.r(name, l, u)
                        lower = [vocab.b(name, l - 1)] if l >= 2 else []
                        builder.add(Rule.normal(r, (vocab.b(name, u),), lower))
                        if lower:
                            builder.add(Rule.integrity((r, lower[0])))
                        builder.add(Rule.integrity((r,), (vocab.b(name, u),)))
            _hall_rules(vocab, c, d, k)
            continue
        for box in conflict_regions(c, _box_domains(c, d), regions):
            builder.add(_bound_region_rule(vocab, violate, c.scope, box, d))
    return builder.build()


def encode(csp, kind, ds=None, regions="maximal"):
    """Dispatch on an EncodingKind."""
    if kind.name == DIRECT:
        return encode_direct(csp, ds)
    if kind.name == SUPPORT:
        return encode_support(csp, ds)
    d = csp.max_value
    if kind.name == RANGE:
        return encode_range(csp, ds, kind.k(d), regions)
    return encode_bound(csp, ds, kind.k(d), regions)


def value_atoms(csp, kind):
    """Per variable, the atoms whose truth decides its value, in value order."""
    d = csp.max_value
    groups = {}
    for name in csp.names:
        if kind.name in (DIRECT, SUPPORT):
            groups[name] = [Atom("e", (name, i)) for i in range(1, d + 1)]
        elif kind.name == BOUND:
            groups[name] = [Atom("b", (name, i)) for i in range(1, d + 1)]
        else:
            groups[name] = [Atom("r", (name, i, i)) for i in range(1, d + 1)]
    return groups


# ---------------------------------------------------------------- regions


def _cells(box):
    return itertools.product(*(range(l, u + 1) for l, u in box))


def _all_forbidden(cells, forbidden):
    return all(cell in forbidden for cell in cells)


def _can_extend(box, dim, step, forbidden, limits):
    l, u = box[dim]
    edge = u + step if step > 0 else l + step
    if edge < limits[dim][0] or edge > limits[dim][1]:
        return False
    slab = list(box)
    slab[dim] = (edge, edge)
    return _all_forbidden(_cells(slab), forbidden)


def _greedy_boxes(tuples, forbidden, limits):
    covered = set()
    boxes = []
    for seed in tuples:
        if seed in covered:
            continue
        box = [(v, v) for v in seed]
        for dim in range(len(box)):
            while _can_extend(box, dim, 1, forbidden, limits):
                box[dim] = (box[dim][0], box[dim][1] + 1)
            while _can_extend(box, dim, -1, forbidden, limits):
                box[dim] = (box[dim][0] - 1, box[dim][1])
        boxes.append(tuple(box))
        covered.update(_cells(box))
    return boxes


class _TooManyBoxes(Exception):
    pass


def _maximal_boxes(tuples, forbidden, limits):
    arity = len(limits)
    counter = [0]

    def boxes(candidates, depth):
        if depth == arity:
            yield ()
            return
        by_first = {}
        for t in candidates:
            by_first.setdefault(t[0], set()).add(t[1:])
        for l in sorted(by_first):
            common = None
            u = l
            while u in by_first:
                common = by_first[u] if common is None else common & by_first[u]
                if not common:
                    break
                for rest in boxes(common, depth + 1):
                    counter[0] += 1
                    if counter[0] > MAX_BOX_ENUMERATION:
                        raise _TooManyBoxes()
                    yield ((l, u),) + rest
                u += 1

    found = []
    for box in boxes(set(tuples), 0):
        if len(box) < arity:
            continue
        if not any(_can_extend(box, dim, step, forbidden, limits) for dim in range(arity) for step in (1, -1)):
            found.append(box)
    return found


def conflict_regions(c, domains, mode="maximal"):
    """
    Boxes whose union is exactly the forbidden tuple set of c

    Args:
        c: constraint (any kind with an extensional form)
        domains: one value collection per scope position, e.g. [1,d] each
        mode: maximal (every maximal all-forbidden box), greedy (greedy
            maximal-box covering) or unit (one box per tuple)

    Returns:
        sorted list of boxes, each a tuple of (l, u) pairs in scope order
    """
    if mode not in REGION_MODES:
        raise ValueError(f"unknown region mode: {mode}")
    tuples = sorted(c.forbidden_tuples(domains))
    if len(c.scope) > 3 and len(tuples) > MAX_REGION_TUPLES:
        raise RegionBlowUpError(c.id, len(tuples))
    if mode == "unit":
        return [tuple((v, v) for v in t) for t in tuples]

    forbidden = set(tuples)
    limits = [(min(dom), max(dom)) for dom in domains]
    if mode == "greedy":
        return sorted(_greedy_boxes(tuples, forbidden, limits))
    try:
        return sorted(_maximal_boxes(tuples, forbidden, limits))
    except _TooManyBoxes:
        logger.warning("too many boxes for %s, using the greedy covering", c.id)
        return sorted(_greedy_boxes(tuples, forbidden, limits))
