import pytest

from obstrukt.groups import build_tilde_a5
from obstrukt.nielsen import enumerate_classes


@pytest.fixture(scope="session")
def ext():
    return build_tilde_a5()


@pytest.fixture(scope="session")
def G(ext):
    return ext.total


@pytest.fixture(scope="session")
def census(G):
    return enumerate_classes(G, ["3A"] * 4)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
