import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from striations.graph import Graph, karate

ACCEPTANCE_LINES: list[str] = []


def path_graph(n):
    return Graph.from_edges(n, np.arange(n - 1), np.arange(1, n))


def star_graph(leaves):
    return Graph.from_edges(leaves + 1, np.zeros(leaves, dtype=int), np.arange(1, leaves + 1))


def complete_graph(n):
    pairs = np.array(list(itertools.combinations(range(n), 2))).reshape(-1, 2)
    return Graph.from_edges(n, pairs[:, 0], pairs[:, 1])


def cycle_graph(n):
    return Graph.from_edges(n, np.arange(n), (np.arange(n) + 1) % n)


def dense_pagerank(g, d=0.85):
    """Solve p = (1-d)/n + d * S p directly, S column-stochastic with
    dangling columns replaced by the uniform vector."""
    n = g.n
    a = g.adjacency().toarray()
    out = a.sum(axis=1)
    s = np.empty((n, n))
    for j in range(n):
        s[:, j] = a[j] / out[j] if out[j] else 1.0 / n
    return np.linalg.solve(np.eye(n) - d * s, np.full(n, (1 - d) / n))


@st.composite
def small_graphs(draw, max_n=12, directed=None):
    n = draw(st.integers(1, max_n))
    is_directed = draw(st.booleans()) if directed is None else directed
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    src = [a for a, _ in pairs]
    dst = [b for _, b in pairs]
    return Graph.from_edges(n, src, dst, directed=is_directed)


@pytest.fixture(scope="session")
def karate_graph():
    return karate()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
