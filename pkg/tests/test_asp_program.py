import itertools
import random

import pytest

from casp_forge.asp_program import (
    BOTTOM,
    CHOICE,
    CARDINALITY,
    Atom,
    GroundProgram,
    ProgramBuilder,
    Rule,
    enumerate_answer_sets,
    is_answer_set,
    is_answer_set_extended,
    is_extended_answer_set,
    least_model,
    reduct,
    transform_extended,
)
from casp_forge.errors import OracleTooLargeError, UntransformedProgramError
from casp_forge.theorem_checks import random_cardinality_program

a, b, h, x, y, z = (Atom(name) for name in "abhxyz")


def program(*rules):
    builder = ProgramBuilder()
    builder.extend(rules)
    return builder.build()


@pytest.fixture
def even_loop():
    """a <- not b. b <- not a."""
    return program(Rule.normal(a, neg=(b,)), Rule.normal(b, neg=(a,)))


@pytest.fixture
def at_least_two():
    """{x; y; z}. h <- 2{x, y, z}."""
    return program(Rule.choice((x, y, z)), Rule.cardinality(h, 2, (x, y, z)))


def test_atom_str():
    assert str(Atom("e", ("x", 1))) == "e(x,1)"
    assert str(a) == "a"


def test_reduct(even_loop):
    r = reduct(even_loop, {a})
    assert r.rules == (Rule.normal(a),)
    assert least_model(r) == {a}


def test_answer_sets_of_even_loop(even_loop):
    assert is_answer_set(even_loop, {a})
    assert is_answer_set(even_loop, {b})
    assert not is_answer_set(even_loop, {a, b})
    assert not is_answer_set(even_loop, set())
    assert enumerate_answer_sets(even_loop) == {frozenset({a}), frozenset({b})}


def test_odd_loop_has_no_answer_set():
    p = program(Rule.normal(a, neg=(a,)))
    assert not is_answer_set(p, set())
    assert not is_answer_set(p, {a})
    assert enumerate_answer_sets(p) == set()


def test_integrity_constraint(even_loop):
    p = program(*even_loop.rules, Rule.integrity((a,)))
    assert enumerate_answer_sets(p) == {frozenset({b})}
    assert not is_answer_set(p, {a, BOTTOM})


def test_choice_rule():
    p = program(Rule.choice((a, b)))
    assert len(enumerate_answer_sets(p)) == 4


def test_cardinality_rule(at_least_two):
    found = enumerate_answer_sets(at_least_two)
    assert len(found) == 8
    for model in found:
        assert (h in model) == (len(model & {x, y, z}) >= 2)


def test_cardinality_with_negative_literals():
    # h holds when at least two of x, not y, not z hold
    p = program(Rule.choice((x, y, z)), Rule.cardinality(h, 2, (x,), (y, z)))
    for model in enumerate_answer_sets(p):
        count = (x in model) + (y not in model) + (z not in model)
        assert (h in model) == (count >= 2)


def test_unreachable_bound_never_fires():
    p = program(Rule.choice((x,)), Rule.cardinality(h, 3, (x,)))
    assert all(h not in model for model in enumerate_answer_sets(p))


def test_transform_leaves_only_normal_rules(at_least_two):
    t = transform_extended(at_least_two)
    assert all(rule.kind not in (CHOICE, CARDINALITY) for rule in t.rules)
    assert set(at_least_two.atoms) <= set(t.atoms)


def test_reduct_needs_normal_rules(at_least_two):
    with pytest.raises(UntransformedProgramError):
        reduct(at_least_two, set())


def test_extended_answer_set_definitions_agree(at_least_two):
    p = program(*at_least_two.rules, Rule.cardinality(BOTTOM, 3, (x, y, z)), Rule.normal(a, (h,), (z,)))
    atoms = [atom for atom in p.atoms if atom != BOTTOM]
    for size in range(len(atoms) + 1):
        for subset in itertools.combinations(atoms, size):
            assert is_answer_set_extended(p, set(subset)) == is_extended_answer_set(p, set(subset))


def test_transform_preserves_answer_sets_of_random_programs():
    rng = random.Random(7)
    for _ in range(200):
        p = random_cardinality_program(rng)
        atoms = [atom for atom in p.atoms if atom != BOTTOM]
        by_definition = {
            frozenset(subset)
            for size in range(len(atoms) + 1)
            for subset in itertools.combinations(atoms, size)
            if is_extended_answer_set(p, subset)
        }
        assert enumerate_answer_sets(p) == by_definition


def test_tightness():
    assert program(Rule.normal(a, neg=(b,))).is_tight
    assert not program(Rule.normal(a, (b,)), Rule.normal(b, (a,))).is_tight
    # a choice rule does not define its heads for tightness
    assert program(Rule.choice((a,), (b,)), Rule.normal(b, (a,))).is_tight


def test_enumeration_guard():
    ys = [Atom("y", (i,)) for i in range(23)]
    p = program(Rule.normal(x, neg=ys))
    with pytest.raises(OracleTooLargeError):
        enumerate_answer_sets(p)


def test_projection(even_loop):
    assert enumerate_answer_sets(even_loop, projection={a}) == {frozenset({a}), frozenset()}


def test_rule_shapes():
    with pytest.raises(ValueError):
        Rule.choice((BOTTOM,))
    with pytest.raises(ValueError):
        Rule("cardinality", (h,), (x,), (), -1)
    with pytest.raises(ValueError):
        GroundProgram((a,), (Rule.normal(a, (b,)),))
