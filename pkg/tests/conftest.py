import functools

import pytest

from primavoid.ff_core import build_field
from primavoid.multiplicative import build_dlog_table, factorize

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def field(p, s, r):
    return build_field(p, s, r)


@functools.lru_cache(maxsize=None)
def table(p, s, r):
    return build_dlog_table(field(p, s, r))


@functools.lru_cache(maxsize=None)
def group_factorization(p, s, r):
    return factorize(field(p, s, r).order - 1)


# (q, r) -> (p, s, r) for the desk-scale grid
DESK = {(3, 2): (3, 1, 2), (3, 3): (3, 1, 3), (3, 4): (3, 1, 4), (4, 2): (2, 2, 2), (4, 3): (2, 2, 3),
        (5, 2): (5, 1, 2), (5, 3): (5, 1, 3), (7, 2): (7, 1, 2), (9, 2): (3, 2, 2)}


@pytest.fixture
def f9():
    return field(3, 1, 2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
