import numpy as np
import pytest

from starcalc.kernels import Interval

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def unit():
    return Interval(0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
