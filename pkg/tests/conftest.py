import pytest

from epos import FiniteStructure, Signature


@pytest.fixture
def s1():
    """Two elements with disequality: not locally refutable."""
    return FiniteStructure(
        signature=Signature({"NEQ": 2}),
        domain_size=2,
        relations={"NEQ": {(0, 1), (1, 0)}},
        name="S1",
    )


@pytest.fixture
def s2():
    """Two elements, R = {(0,0), (0,1)}: 0-valid, hence locally refutable."""
    return FiniteStructure(
        signature=Signature({"R": 2}),
        domain_size=2,
        relations={"R": {(0, 0), (0, 1)}},
        name="S2",
    )
