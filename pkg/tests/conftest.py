import pytest

from premodular import families


@pytest.fixture(scope="session")
def su2_4():
    return families.su2(4)


@pytest.fixture(scope="session")
def even_su2_4(su2_4):
    return su2_4.restrict([0, 2, 4])


@pytest.fixture(scope="session")
def suite():
    return families.builtin_suite()
