import numpy as np
import pytest

from semisum import fixtures
from semisum.algebra import FiniteAlgebra
from semisum.terms import Signature

MUL = Signature((("mul", 2),))
BIS = fixtures.BISEMILATTICE


def groupoid(rows, name=""):
    rows = np.asarray(rows)
    return FiniteAlgebra(MUL, rows.shape[0], {"mul": rows}, name)


@pytest.fixture(scope="session")
def exss():
    return fixtures.algebra("exss")


@pytest.fixture
def lz2():
    return fixtures.algebra("lz2")


@pytest.fixture
def rz2():
    return fixtures.algebra("rz2")


@pytest.fixture
def chain2():
    return fixtures.algebra("chain2")


@pytest.fixture
def chain3():
    return fixtures.algebra("chain3")
