import itertools
import random

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from casp_forge.consistency_oracles import (
    DomainState,
    HallInterval,
    enforce_ac_binary,
    enforce_bound,
    enforce_domain,
    enforce_range,
    hall_intervals,
)
from casp_forge.csp_model import ALL_DIFFERENT, FORBIDDEN, NOT_EQUAL, Constraint, evaluate
from casp_forge.errors import OracleTooLargeError
from casp_forge.theorem_checks import random_binary_csp, random_subdomains


def test_ac_on_single_allowed_tuple(diagonal_pair):
    ds = enforce_ac_binary(diagonal_pair, DomainState.from_csp(diagonal_pair))
    assert ds["x"] == {1}
    assert ds["y"] == {1}


def test_ac_prunes_neq(neq_pair):
    ds = enforce_ac_binary(neq_pair, DomainState({"x": {1}, "y": {1, 2}}))
    assert ds["y"] == {2}


def test_ac_wipe_out_is_all_empty(neq_pair):
    ds = enforce_ac_binary(neq_pair, DomainState({"x": {1}, "y": {1}}))
    assert ds.wiped_out
    assert ds == DomainState.wiped(["x", "y"])


def test_bound_and_range_find_the_hall_interval(alldiff_three, hall_state):
    for enforce in (enforce_bound, enforce_range, enforce_domain):
        ds = enforce(alldiff_three, hall_state)
        assert ds["x3"] == {3}
        assert ds["x1"] == {1, 2}


def test_ac_misses_the_hall_interval(alldiff_three, hall_state):
    assert enforce_ac_binary(alldiff_three, hall_state)["x3"] == {1, 2, 3}


def test_bound_keeps_interior_values(make_csp):
    csp = make_csp({"x": {1, 2, 3}, "y": {2}}, [Constraint("c", ("x", "y"), ALL_DIFFERENT)])
    ds = DomainState.from_csp(csp)
    assert enforce_bound(csp, ds)["x"] == {1, 2, 3}
    assert enforce_range(csp, ds)["x"] == {1, 3}
    assert enforce_domain(csp, ds)["x"] == {1, 3}


def test_range_relaxes_to_hulls(make_csp):
    # x=2 has y=2 as a support inside y's hull [1,3] even though 2 is not in D(y)
    csp = make_csp({"x": {1, 2, 3}, "y": {1, 3}}, [Constraint("c", ("x", "y"), FORBIDDEN, {(2, 1), (2, 3)})])
    ds = DomainState.from_csp(csp)
    assert enforce_range(csp, ds)["x"] == {1, 2, 3}
    assert enforce_domain(csp, ds)["x"] == {1, 3}


def test_domain_consistency_guard(make_csp):
    csp = make_csp(
        {"a": range(1, 102), "b": range(1, 102), "c": range(1, 102)},
        [Constraint("f", ("a", "b", "c"), FORBIDDEN, {(1, 1, 1)})],
    )
    with pytest.raises(OracleTooLargeError):
        enforce_domain(csp, DomainState.from_csp(csp))


def test_hall_intervals(hall_state):
    found = hall_intervals(hall_state, ("x1", "x2", "x3"))
    assert HallInterval(1, 2, frozenset({"x1", "x2"})) in found
    assert HallInterval(1, 3, frozenset({"x1", "x2", "x3"})) in found
    assert all(h.lo != 3 or h.hi != 3 for h in found)


def test_hall_intervals_of_empty_scope():
    assert hall_intervals(DomainState({"x": set()}), ("x",)) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_oracles_shrink_and_are_idempotent(seed):
    rng = random.Random(seed)
    csp = random_binary_csp(rng, max_vars=4, max_d=4)
    ds = random_subdomains(rng, csp)
    for enforce in (enforce_ac_binary, enforce_bound, enforce_range, enforce_domain):
        once = enforce(csp, ds)
        assert once.is_subset_of(ds)
        assert enforce(csp, once).canonical() == once.canonical()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_strength_order(seed):
    rng = random.Random(seed)
    csp = random_binary_csp(rng, max_vars=4, max_d=4)
    ds = random_subdomains(rng, csp)
    dc = enforce_domain(csp, ds).canonical()
    rc = enforce_range(csp, ds).canonical()
    bc = enforce_bound(csp, ds).canonical()
    assert dc.is_subset_of(rc)
    assert rc.is_subset_of(bc)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_solutions_survive_every_oracle(seed):
    rng = random.Random(seed)
    csp = random_binary_csp(rng, max_vars=4, max_d=4)
    ds = random_subdomains(rng, csp)
    candidates = (dict(zip(csp.names, values)) for values in itertools.product(*(sorted(ds[name]) for name in csp.names)))
    solutions = [a for a in candidates if evaluate(csp, a).is_solution]
    for enforce in (enforce_ac_binary, enforce_bound, enforce_range, enforce_domain):
        pruned = enforce(csp, ds)
        for a in solutions:
            assert all(a[name] in pruned[name] for name in csp.names)


def test_domain_consistency_on_neq(make_csp):
    csp = make_csp({"x": {1, 2}, "y": {2}}, [Constraint("c", ("x", "y"), NOT_EQUAL)])
    assert enforce_domain(csp, DomainState.from_csp(csp))["x"] == {1}
