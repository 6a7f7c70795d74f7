import functools
import math

import pytest
from scipy.optimize import minimize_scalar

from haartma.haar import hdwt_forward, sample_sine


@functools.lru_cache(maxsize=None)
def sine_coeffs(m, grid="midpoint"):
    return hdwt_forward(sample_sine(m, grid))


@pytest.fixture
def sine32():
    return sine_coeffs(32)


def dirichlet_msll_db(n):
    """Highest sidelobe of |sin(n x/2) / (n sin(x/2))| found by bounded search."""
    f = lambda x: -abs(math.sin(n * x / 2) / (n * math.sin(x / 2)))
    res = minimize_scalar(f, bounds=(2 * math.pi / n, 4 * math.pi / n), method="bounded",
                          options={"xatol": 1e-12})
    return 20 * math.log10(-res.fun)


# Acceptance results collected by tests/test_acceptance.py and echoed in the summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
