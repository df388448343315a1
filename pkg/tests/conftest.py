import pytest

from biaslab.arith import build_spf_sieve
from biaslab.ff.core import build_irreducibles


@pytest.fixture(scope="session")
def small_table():
    return build_spf_sieve(10**6)


@pytest.fixture(scope="session")
def big_table():
    return build_spf_sieve(10**7)


@pytest.fixture(scope="session")
def irr2():
    return build_irreducibles(2, 16)


@pytest.fixture(scope="session")
def irr3():
    return build_irreducibles(3, 14)


@pytest.fixture(scope="session")
def irr5():
    return build_irreducibles(5, 8)
