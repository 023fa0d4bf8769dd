import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from isirgn import Graph, TrainConfig, train


@pytest.fixture(scope="session")
def small_model():
    return train(TrainConfig(g=4, m=60, d=3, c=6, p=6, w=4, master_seed=1))


@pytest.fixture(scope="session")
def directed_model():
    return train(TrainConfig(g=4, m=60, d=2, c=4, p=4, w=3, directed=True, master_seed=2))


@pytest.fixture(scope="session")
def labeled_model():
    return train(TrainConfig(g=4, m=60, d=2, c=4, p=4, w=3, nnl=3, nel=2, master_seed=3))


def triangle():
    return Graph.from_edges(3, [0, 1, 2], [1, 2, 0])


def star(leaves):
    return Graph.from_edges(leaves + 1, [0] * leaves, list(range(1, leaves + 1)))


def path(n):
    return Graph.from_edges(n, list(range(n - 1)), list(range(1, n)))


def cycle(n):
    return Graph.from_edges(n, list(range(n)), [(i + 1) % n for i in range(n)])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
