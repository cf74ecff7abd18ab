import numpy as np
import pytest

from friedmann_lab.params import ReducedParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ref():
    """Case II(ii) reference: R_min = 1, H_min = 1, R_w = 4^(-1/3), R_wH = 3/2."""
    return ReducedParams(2 / 3, 4 / 3, 1.0, 1)


@pytest.fixture
def inner():
    """Case II(i): cubic R^3 - 3R + 1, forbidden interval (0.347..., 1.532...)."""
    return ReducedParams(1.0, 1.0, 3.0, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
