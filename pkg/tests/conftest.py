import pytest

from densys.adaptive import run_adaptive_case


@pytest.fixture(scope="session")
def adapt1():
    return run_adaptive_case(1)


@pytest.fixture(scope="session")
def adapt2():
    return run_adaptive_case(2)


@pytest.fixture(scope="session")
def adapt3():
    return run_adaptive_case(3)


@pytest.fixture(scope="session")
def adapt4():
    return run_adaptive_case(4)


@pytest.fixture(scope="session")
def adapt5():
    return run_adaptive_case(5)
