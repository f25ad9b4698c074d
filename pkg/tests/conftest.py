import random

import pytest

from rewalk.access import AccessSession
from rewalk.generators import barbell
from rewalk.graph import Graph, is_connected

# one line per acceptance criterion, surfaced after the run summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def barbell11():
    return barbell(11)


@pytest.fixture
def barbell4():
    return barbell(4)


@pytest.fixture
def k4():
    return complete_graph(4)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges([(i, (i + 1) % n) for i in range(n)])


def random_connected_graph(n: int, seed: int, p: float = 0.5) -> Graph:
    """Erdos-Renyi sample, re-drawn until connected."""
    rng = random.Random(seed)
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        g = Graph.from_edges(edges, num_nodes=n)
        if is_connected(g):
            return g


def is_bipartite(g: Graph) -> bool:
    color: dict[int, int] = {}
    for s in g.node_ids():
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                if v not in color:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def random_connected_aperiodic(n: int, seed: int, p: float = 0.5) -> Graph:
    """Connected non-bipartite sample (periodic chains never mix)."""
    rng = random.Random(seed)
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        g = Graph.from_edges(edges, num_nodes=n)
        if is_connected(g) and not is_bipartite(g):
            return g


def fresh_session(graph: Graph, **kwargs) -> AccessSession:
    return AccessSession(graph, **kwargs)
