import pytest

from casp_forge.consistency_oracles import DomainState
from casp_forge.csp_model import ALL_DIFFERENT, ALLOWED, NOT_EQUAL, Constraint, CspInstance, VariableDecl


def build_csp(domains, constraints=()):
    return CspInstance(tuple(VariableDecl(name, frozenset(values)) for name, values in domains.items()), tuple(constraints))


@pytest.fixture
def make_csp():
    return build_csp


@pytest.fixture
def neq_pair():
    """x != y over [1,2]"""
    return build_csp({"x": range(1, 3), "y": range(1, 3)}, [Constraint("c", ("x", "y"), NOT_EQUAL)])


@pytest.fixture
def diagonal_pair():
    """x = y = 1 is the only allowed tuple over [1,2]"""
    return build_csp({"x": range(1, 3), "y": range(1, 3)}, [Constraint("c", ("x", "y"), ALLOWED, {(1, 1)})])


@pytest.fixture
def alldiff_three():
    """all-different over x1, x2, x3 in [1,3]"""
    return build_csp(
        {"x1": range(1, 4), "x2": range(1, 4), "x3": range(1, 4)},
        [Constraint("ad", ("x1", "x2", "x3"), ALL_DIFFERENT)],
    )


@pytest.fixture
def hall_state():
    """x1, x2 squeezed into [1,2] so x3 must take 3"""
    return DomainState({"x1": {1, 2}, "x2": {1, 2}, "x3": {1, 2, 3}})
