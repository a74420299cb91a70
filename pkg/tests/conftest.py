import pytest

from regrep.localring import make_ring, parse_ring_spec


def ring(text: str):
    return make_ring(parse_ring_spec(text))


@pytest.fixture(scope="session")
def z8():
    return ring("Zp:p=2,r=3")


@pytest.fixture(scope="session")
def z4():
    return ring("Zp:p=2,r=2")


@pytest.fixture(scope="session")
def f2t3():
    return ring("Fqt:p=2,f=1,r=3")
