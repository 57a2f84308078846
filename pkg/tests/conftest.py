import numpy as np
import pytest

from outcome_range import instance_io
from outcome_range.intervals import IntervalVector
from outcome_range.lp import IlpInstance


@pytest.fixture
def example1():
    return instance_io.bundled("example1")


@pytest.fixture
def example2():
    return instance_io.bundled("example2")


@pytest.fixture
def example3():
    return instance_io.bundled("example3")


@pytest.fixture
def transportation():
    return instance_io.bundled("transportation")


def make_instance(A, c, lower, upper, name=None):
    return IlpInstance(np.asarray(A, float), np.asarray(c, float),
                       IntervalVector(np.asarray(lower, float), np.asarray(upper, float)), name)


def rel_close(a, b, rtol=1e-6):
    return abs(a - b) <= rtol * max(1.0, abs(b))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
