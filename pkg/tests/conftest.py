import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lapflow import generators  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


@pytest.fixture
def unit_pair():
    return generators.path_graph(2)


@pytest.fixture
def signed_pair():
    return generators.path_graph(2, weight=-1)


@pytest.fixture
def complex_pair():
    return generators.path_graph(2, weight=1 + 1j)


@pytest.fixture
def three_cycle():
    return generators.cycle_graph(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_line(k))
