import pytest

from chesschaos.kernel import parse_fen
from chesschaos.solver import TableSet

MATE_IN_ONE = "k7/7Q/1K6/8/8/8/8/8 w - - 0 1"
STALEMATE = "k7/2K5/1Q6/8/8/8/8/8 b - - 0 1"
MATED = "k7/Q7/1K6/8/8/8/8/8 b - - 0 1"


@pytest.fixture(scope="session")
def tables():
    return TableSet()


@pytest.fixture(scope="session")
def kqk(tables):
    return tables.get("KQvK")


@pytest.fixture(scope="session")
def krk(tables):
    return tables.get("KRvK")


@pytest.fixture(scope="session")
def kvk(tables):
    return tables.get("KvK")


@pytest.fixture
def mate_in_one():
    return parse_fen(MATE_IN_ONE)


@pytest.fixture
def stalemate():
    return parse_fen(STALEMATE)
