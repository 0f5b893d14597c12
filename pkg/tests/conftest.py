import math

import pytest

from doublecircle.circle import GOLDEN
from doublecircle.map1d import find_two_cycle, logistic_family
from doublecircle.skew import ConstantRotation, SkewSystem

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def logistic():
    return logistic_family()


@pytest.fixture(scope="session")
def cycle32(logistic):
    return find_two_cycle(logistic, 3.2)


@pytest.fixture(scope="session")
def golden_system(logistic):
    return SkewSystem(logistic, ConstantRotation(GOLDEN), 3.2)


def closed_form_cycle(lam):
    """Logistic 2-cycle from the quadratic factor of f(f(r)) - r."""
    s = math.sqrt((lam - 3.0) * (lam + 1.0))
    return (lam + 1.0 - s) / (2 * lam), (lam + 1.0 + s) / (2 * lam)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
