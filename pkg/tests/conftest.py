import numpy as np
import pytest

CRITERION_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def report_criterion():
    def rec(r):
        line = r.line()
        print(line)
        CRITERION_LINES.append((r.number, line))
        return r
    return rec


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)
