import json
from pathlib import Path

import numpy as np
import pytest

from malbench.games import PARETO_EXAMPLE, from_bimatrix

ORACLES = json.loads((Path(__file__).parent / "data" / "oracles.json").read_text())


@pytest.fixture
def oracles():
    return ORACLES


@pytest.fixture
def pareto_game():
    return PARETO_EXAMPLE


@pytest.fixture
def pennies():
    return from_bimatrix([[2, 1], [1, 2]], [[1, 2], [2, 1]], "pennies")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
