import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from cdsample.graph import Graph


def gnp(n, p, seed):
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


@pytest.fixture
def two_triangles():
    # nodes 0-2 and 3-5, bridge 2-3
    return Graph.from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


@st.composite
def graphs(draw, min_nodes=1, max_nodes=12, min_edges=0):
    n = draw(st.integers(min_nodes, max_nodes))
    all_pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(all_pairs), max_size=len(all_pairs)))
    pairs = [p for p, keep in zip(all_pairs, mask) if keep]
    if len(pairs) < min_edges:
        pairs = all_pairs[:max(min_edges, len(pairs))]
    return Graph.from_edges(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))


# acceptance criteria report one line each at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
