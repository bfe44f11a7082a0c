import numpy as np
import pytest

from morphoflight.dynamics import RobotParams
from morphoflight.ground_effect import load_table


@pytest.fixture(scope="session")
def params():
    return RobotParams()


@pytest.fixture(scope="session")
def geom(params):
    return params.linkage


@pytest.fixture(scope="session")
def table():
    return load_table()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
