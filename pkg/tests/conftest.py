import sys

import numpy as np
import pytest

from triangle_cyclicity.picard_fuchs import default_flow


@pytest.fixture(scope="session")
def flow():
    return default_flow()


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


def pytest_terminal_summary(terminalreporter):
    mods = [m for name, m in sys.modules.items() if name.rsplit(".", 1)[-1] == "test_acceptance"]
    lines = getattr(mods[0], "SUMMARY", []) if mods else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
