import random

import pytest

from recalc.arith import make_field, random_q0
from recalc.double import double_algebra
from recalc.tensor import dj_r_matrix


@pytest.fixture(scope="session")
def F():
    return make_field()


@pytest.fixture(scope="session")
def R2(F):
    return dj_r_matrix(F, 2)


@pytest.fixture(scope="session")
def alg2(R2):
    return double_algebra(R2)


@pytest.fixture(scope="session")
def alg3():
    """N = 3 at one fixed random point."""
    q0 = random_q0(random.Random(11))
    return double_algebra(dj_r_matrix(make_field(q0), 3))


def q_(text, field=None):
    from recalc.arith import parse_scalar

    return parse_scalar(text, field or make_field())


# acceptance lines are collected here and printed at the end of the session
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
