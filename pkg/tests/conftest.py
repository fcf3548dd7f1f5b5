import pytest

from bklbounce.algebra import get_algebra


@pytest.fixture(scope="session")
def algebra():
    return get_algebra()


@pytest.fixture()
def base():
    return (0, 0, 0, 0)
