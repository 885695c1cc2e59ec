import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sigbench.graph import Graph


def build_graph(n, edges, directed=True) -> Graph:
    src = np.array([e[0] for e in edges], dtype=np.int64)
    dst = np.array([e[1] for e in edges], dtype=np.int64)
    return Graph([str(i) for i in range(n)], src, dst, directed=directed)


def clique_edges(nodes):
    nodes = list(nodes)
    return [(nodes[i], nodes[j]) for i in range(len(nodes))
            for j in range(i + 1, len(nodes))]


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def two_k5_bridge():
    edges = clique_edges(range(5)) + clique_edges(range(5, 10)) + [(0, 5)]
    return build_graph(10, edges)


@pytest.fixture
def barbell():
    edges = clique_edges(range(8)) + clique_edges(range(8, 16))
    edges += [(7, 16), (16, 17), (17, 8)]
    return build_graph(18, edges)
