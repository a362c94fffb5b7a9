import pytest
from hypothesis import settings

from operp.models import build_M1_general, build_M1_rr, tower

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def M1():
    return build_M1_rr()


@pytest.fixture(scope="session")
def M2(M1):
    return tower(M1, 2)


@pytest.fixture(scope="session")
def chain4():
    return build_M1_general(4)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[num])
