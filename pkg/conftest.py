# conftest.py
import pytest

from borsuk.hypercube_core import build_M
from borsuk.ortho_graph import build_graph


@pytest.fixture(scope="session")
def m4():
    return build_M(4)


@pytest.fixture(scope="session")
def m8():
    return build_M(8)


@pytest.fixture(scope="session")
def m12():
    return build_M(12)


@pytest.fixture(scope="session")
def graph8(m8):
    return build_graph(m8)


@pytest.fixture(scope="session")
def graph12(m12):
    return build_graph(m12)
