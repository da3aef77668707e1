from pathlib import Path

import numpy as np
import pytest

from extrarec.graph import BipartiteGraph

ROOT = Path(__file__).resolve().parent.parent
MOVIELENS = ROOT / "data" / "ml-100k" / "u.data"

# u1..u5 / i1..i5 from the worked example, zero-based.
TOY_ADJ = [[0, 1, 2], [0, 1], [0, 3], [2, 3, 4], [1]]

ACCEPTANCE_LINES = []


@pytest.fixture
def toy():
    return BipartiteGraph.from_adjacency(TOY_ADJ, n_items=5)


@pytest.fixture
def toy_matrix():
    A = np.zeros((5, 5))
    for u, items in enumerate(TOY_ADJ):
        A[u, items] = 1
    return A


@pytest.fixture(scope="session")
def movielens_path():
    if not MOVIELENS.exists():
        pytest.fail(f"MovieLens 100K not found at {MOVIELENS}; run scripts/fetch_movielens.py")
    return MOVIELENS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
