import pytest

from residuekit.polyring import PolyTower


@pytest.fixture
def uv():
    return PolyTower([[], ["u", "v"]])


@pytest.fixture
def s_u():
    return PolyTower([["s"], ["u"]])


@pytest.fixture
def tower3():
    return PolyTower([[], ["u"], ["v"]])
