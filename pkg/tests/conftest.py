import numpy as np
import pytest

from semikernel.model import OperatorSpec


@pytest.fixture
def toy2():
    return OperatorSpec.toy(2, 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)



def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(config.acceptance_lines):
            terminalreporter.write_line(config.acceptance_lines[n])
