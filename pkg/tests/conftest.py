import numpy as np
import pytest

from timesym.state import RegisterLayout, StateVector

ACCEPTANCE_LINES: list[str] = []


def kets(layout: RegisterLayout, terms) -> StateVector:
    """Equal-weight sum of ``|b>_B|a>_A`` over bitstring pairs."""
    amps = np.zeros(layout.dim, dtype=complex)
    for b, a in terms:
        amps[layout.index(int(b, 2), int(a, 2))] = 1.0
    return StateVector(layout, amps, normalize=True)


def all_bits(n):
    return [format(v, f"0{n}b") for v in range(1 << n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
