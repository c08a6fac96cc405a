import random

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from casp_forge.asp_program import Atom, ProgramBuilder, Rule
from casp_forge.consistency_oracles import DomainState, enforce_bound
from casp_forge.csp_model import ALL_DIFFERENT, ALLOWED, Constraint, CspInstance, VariableDecl
from casp_forge.encoders import BOUND, DIRECT, RANGE, SUPPORT, EncodingKind, encode
from casp_forge.errors import NotTightError
from casp_forge.generators import gen_pigeonhole
from casp_forge.propagation_engine import (
    CONFLICT,
    FIXPOINT,
    Literal,
    PropagationOutcome,
    compile_program,
    extract_domains,
    inject_domains,
    propagate_encoding,
    unit_propagate,
)
from casp_forge.theorem_checks import random_cardinality_program

a, b, h, x, y, z, violate = (Atom(name) for name in ("a", "b", "h", "x", "y", "z", "violate"))


def store_of(*rules):
    builder = ProgramBuilder()
    builder.extend(rules)
    return compile_program(builder.build())


def true(atom):
    return Literal(atom)


def false(atom):
    return Literal(atom, False)


def test_integrity_forces_the_other_branch():
    out = unit_propagate(store_of(Rule.normal(a, neg=(b,)), Rule.normal(b, neg=(a,)), Rule.integrity((a,))))
    assert out.status == FIXPOINT
    assert out.value(a) is False
    assert out.value(b) is True


def test_unsupported_atom_is_false():
    out = unit_propagate(store_of(Rule.normal(a, neg=(b,))), [false(b)])
    assert out.value(a) is True
    # b has no rule at all
    assert unit_propagate(store_of(Rule.normal(a, neg=(b,)))).value(b) is False


def test_cardinality_head_false_blocks_the_rest():
    store = store_of(Rule.choice((x, y, z)), Rule.cardinality(h, 2, (x, y, z)))
    out = unit_propagate(store, [false(h), true(x)])
    assert out.value(y) is False
    assert out.value(z) is False


def test_cardinality_head_true_needs_the_rest():
    store = store_of(Rule.choice((x, y, z)), Rule.cardinality(h, 3, (x, y, z)))
    out = unit_propagate(store, [true(h)])
    assert (out.value(x), out.value(y), out.value(z)) == (True, True, True)


def test_at_least_one_value():
    store = store_of(Rule.choice((x, y)), Rule.integrity(neg=(x, y)))
    assert unit_propagate(store, [false(x)]).value(y) is True


def test_hall_rule_on_interval_atoms():
    store = store_of(Rule.choice((x, y, z)), Rule.cardinality(violate, 3, (x, y, z)), Rule.integrity((violate,)))
    out = unit_propagate(store, [true(x), true(y)])
    assert out.status == FIXPOINT
    assert out.value(z) is False


def test_contradictory_assumptions():
    store = store_of(Rule.choice((a,)))
    out = unit_propagate(store, [true(a), false(a)])
    assert out.status == CONFLICT


def test_not_tight():
    with pytest.raises(NotTightError):
        store_of(Rule.normal(a, (b,)), Rule.normal(b, (a,)))


def test_bodies_are_shared():
    store = store_of(Rule.choice((x, y)), Rule.normal(a, (x, y)), Rule.normal(b, (y, x)))
    assert sum(1 for atom in store.atoms if atom.name == "_body") == 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_reasons_hold_in_the_final_assignment(seed):
    rng = random.Random(seed)
    program = random_cardinality_program(rng)
    atoms = [atom for atom in program.atoms if atom.name != "_bottom"]
    assumptions = [Literal(atom, rng.random() < 0.5) for atom in rng.sample(atoms, 2)]
    out = unit_propagate(compile_program(program), assumptions)
    if out.status == CONFLICT:
        return
    for literal, reason in out.trail:
        if reason is None:
            continue
        assert literal.complement() in reason
        for other in reason:
            if other != literal.complement():
                assert out.value(other.atom) is other.positive


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_order_of_assumptions_does_not_matter(seed, shuffler):
    rng = random.Random(seed)
    program = random_cardinality_program(rng)
    atoms = [atom for atom in program.atoms if atom.name != "_bottom"]
    assumptions = [Literal(atom, rng.random() < 0.5) for atom in rng.sample(atoms, 3)]
    store = compile_program(program)
    first = unit_propagate(store, assumptions)
    shuffled = list(assumptions)
    shuffler.shuffle(shuffled)
    second = unit_propagate(store, shuffled)
    assert first.status == second.status
    if first.status == FIXPOINT:
        assert first.assignment == second.assignment


def test_pigeonhole_two_is_refuted_by_propagation():
    csp = gen_pigeonhole(2)
    for name in (DIRECT, SUPPORT, BOUND, RANGE):
        out = unit_propagate(compile_program(encode(csp, EncodingKind(name))))
        assert out.status == CONFLICT, name


def test_pigeonhole_three_survives_propagation():
    out = unit_propagate(compile_program(encode(gen_pigeonhole(3), EncodingKind(SUPPORT))))
    assert out.status == FIXPOINT


def test_pigeonhole_three_bound_refuted_by_hall_rule():
    out = unit_propagate(compile_program(encode(gen_pigeonhole(3), EncodingKind(BOUND))))
    assert out.status == CONFLICT


def one_var(d):
    return CspInstance((VariableDecl("v", range(1, d + 1)),))


def test_inject_domains():
    assert set(inject_domains(DomainState({"v": {2, 3}}), EncodingKind(BOUND), one_var(4))) == {
        false(Atom("b", ("v", 1))),
        true(Atom("b", ("v", 3))),
    }
    assert inject_domains(DomainState({"v": {1, 3}}), EncodingKind(RANGE), one_var(3)) == [false(Atom("r", ("v", 2, 2)))]
    assert set(inject_domains(DomainState({"v": {2}}), EncodingKind(SUPPORT), one_var(3))) == {
        false(Atom("e", ("v", 1))),
        false(Atom("e", ("v", 3))),
    }


def outcome(values):
    return PropagationOutcome(FIXPOINT, {Atom(name, tuple(args)): value for (name, *args), value in values.items()}, ())


def test_extract_domains():
    csp = one_var(4)
    bound = outcome({("b", "v", 1): False, ("b", "v", 2): False, ("b", "v", 3): True, ("b", "v", 4): None})
    assert extract_domains(bound, EncodingKind(BOUND), csp)["v"] == {3}
    csp = one_var(3)
    rng = outcome({("r", "v", 1, 1): False})
    assert extract_domains(rng, EncodingKind(RANGE), csp)["v"] == {2, 3}
    direct = outcome({("e", "v", 2): False})
    assert extract_domains(direct, EncodingKind(DIRECT), csp)["v"] == {1, 3}
    conflict = PropagationOutcome(CONFLICT, {}, ())
    assert extract_domains(conflict, EncodingKind(SUPPORT), csp).wiped_out


def test_propagate_support_is_arc_consistency(diagonal_pair):
    ds = propagate_encoding(diagonal_pair, DomainState.from_csp(diagonal_pair), EncodingKind(SUPPORT))
    assert ds == DomainState({"x": {1}, "y": {1}})


def test_propagate_direct_does_not_prune(diagonal_pair):
    full = DomainState.from_csp(diagonal_pair)
    assert propagate_encoding(diagonal_pair, full, EncodingKind(DIRECT)) == full


def test_propagate_range_hall(alldiff_three, hall_state):
    for kind in (EncodingKind(RANGE), EncodingKind(BOUND)):
        assert propagate_encoding(alldiff_three, hall_state, kind)["x3"] == {3}
    # a Hall bound of 1 only sees singleton intervals
    assert propagate_encoding(alldiff_three, hall_state, EncodingKind(RANGE, 1))["x3"] == {1, 2, 3}


def test_bound_propagation_skips_domain_holes(alldiff_three):
    ds = DomainState({"x1": {1, 3}, "x2": {1}, "x3": {2, 3}})
    expected = DomainState({"x1": {3}, "x2": {1}, "x3": {2}})
    assert propagate_encoding(alldiff_three, ds, EncodingKind(BOUND)) == expected
    assert enforce_bound(alldiff_three, ds) == expected


def test_propagate_keeps_wipe_out_canonical(make_csp):
    csp = make_csp({"x": {1, 2}, "y": {1, 2}}, [Constraint("c", ("x", "y"), ALLOWED, {(1, 2)})])
    ds = propagate_encoding(csp, DomainState({"x": {2}, "y": {1, 2}}), EncodingKind(SUPPORT))
    assert ds == DomainState.wiped(["x", "y"])


def test_propagate_never_grows(make_csp):
    csp = make_csp({"x": range(1, 4), "y": range(1, 4)}, [Constraint("c", ("x", "y"), ALL_DIFFERENT)])
    ds = DomainState({"x": {1, 3}, "y": {1, 2, 3}})
    for name in (SUPPORT, BOUND, RANGE):
        assert propagate_encoding(csp, ds, EncodingKind(name)).is_subset_of(ds)
