import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from charvar4.matrices import random_sl4, random_su31  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def sl4_pair():
    return random_sl4(11).matrix, random_sl4(12).matrix


@pytest.fixture
def su31_pair():
    return random_su31(21).matrix, random_su31(22).matrix


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
