import pytest

from ldpcb.io import table_fixture


@pytest.fixture(scope="session")
def table1():
    return table_fixture("table1")


@pytest.fixture(scope="session")
def table2():
    return table_fixture("table2")


@pytest.fixture(scope="session")
def table3():
    return table_fixture("table3")
