import numpy as np
import pytest

from dynsym.wavepacket import Scenario

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []

FIG2A_SETS = [(1.0, 3.33), (0.3, 1.0), (0.1, 0.333)]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def red():
    """Narrow packets whose collision probability stays below one."""
    return Scenario.symmetric(0.1, 0.333, 5.0)


@pytest.fixture(scope="session")
def wide():
    return Scenario.symmetric(1.0, 3.33, 5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
