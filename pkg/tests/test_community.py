import numpy as np
import pytest

from sigbench.graph import Graph
from sigbench.signals.community import (community_features, infomap, leiden,
                                        louvain, map_equation_codelength,
                                        modularity)

from conftest import build_graph, clique_edges
from oracles import best_partition_exhaustive, modularity_oracle, random_graph


def _directed_clique_pair():
    """Two directed 4-cliques joined by a reciprocal edge pair."""
    edges = []
    for base in (0, 4):
        for i in range(4):
            for j in range(4):
                if i != j:
                    edges.append((base + i, base + j))
    edges += [(0, 4), (4, 0)]
    return build_graph(8, edges)


def test_modularity_matches_oracle():
    edges = random_graph(20, 0.2, 1)
    g = build_graph(20, edges)
    rng = np.random.default_rng(0)
    for _ in range(5):
        assignment = rng.integers(0, 4, size=20)
        assignment = np.unique(assignment, return_inverse=True)[1]
        assert modularity(g, assignment) == pytest.approx(
            modularity_oracle(20, edges, assignment), abs=1e-12)


def test_exhaustive_oracle_two_k4s_prefers_clique_split():
    # shrunk two-clique variant small enough to enumerate all partitions
    edges = clique_edges(range(4)) + clique_edges(range(4, 8)) + [(0, 4)]
    best, best_q = best_partition_exhaustive(8, edges)
    assert best.tolist() == [0, 0, 0, 0, 1, 1, 1, 1]


def test_louvain_two_k5_split(two_k5_bridge):
    p = louvain(two_k5_bridge, seed=1)
    assert p.assignment.tolist() == [0] * 5 + [1] * 5
    assert p.quality == pytest.approx(
        modularity_oracle(10, list(zip(two_k5_bridge.src, two_k5_bridge.dst)),
                          p.assignment), abs=1e-12)


def test_louvain_single_clique():
    g = build_graph(5, clique_edges(range(5)))
    assert louvain(g, seed=0).n_communities == 1


def test_louvain_empty_edge_set():
    g = Graph(["a", "b", "c"], np.array([], dtype=np.int64),
              np.array([], dtype=np.int64))
    p = louvain(g, seed=0)
    assert p.assignment.tolist() == [0, 1, 2]
    assert p.quality == 0.0


def test_louvain_not_below_singletons():
    for seed in range(5):
        edges = random_graph(30, 0.12, seed)
        g = build_graph(30, edges)
        p = louvain(g, seed=seed)
        q_single = modularity_oracle(30, edges, np.arange(30))
        assert p.quality >= q_single - 1e-12


def test_louvain_deterministic():
    edges = random_graph(40, 0.1, 3)
    g = build_graph(40, edges)
    assert louvain(g, seed=9).assignment.tolist() == \
        louvain(g, seed=9).assignment.tolist()


def test_leiden_two_k5(two_k5_bridge):
    p = leiden(two_k5_bridge, seed=1)
    assert p.n_communities == 2


def test_leiden_communities_connected():
    for seed in range(5):
        edges = random_graph(40, 0.07, seed)
        g = build_graph(40, edges)
        p = leiden(g, seed=seed)
        adj = g.adj
        for c in range(p.n_communities):
            members = np.flatnonzero(p.assignment == c)
            seen = {members[0]}
            stack = [members[0]]
            mset = set(members.tolist())
            while stack:
                v = stack.pop()
                for u in adj.neighbors(int(v)):
                    if u in mset and u not in seen:
                        seen.add(u)
                        stack.append(u)
            assert seen == mset, f"community {c} disconnected"


def test_leiden_never_spans_components():
    edges = clique_edges(range(4)) + clique_edges(range(4, 8))
    g = build_graph(8, edges)
    p = leiden(g, seed=0)
    assert len(set(p.assignment[:4]) & set(p.assignment[4:])) == 0


def test_leiden_at_least_louvain_quality():
    for seed in range(20):
        edges = random_graph(50, 0.08, seed + 200)
        g = build_graph(50, edges)
        q_lou = louvain(g, seed=seed).quality
        q_lei = leiden(g, seed=seed).quality
        assert q_lei >= q_lou - 1e-9


def test_infomap_two_modules():
    g = _directed_clique_pair()
    p = infomap(g, seed=3)
    assert p.n_communities == 2
    assert p.assignment.tolist() == [0] * 4 + [1] * 4
    split = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    merged = np.zeros(8, dtype=int)
    assert map_equation_codelength(g, split) < map_equation_codelength(g, merged)


def test_infomap_single_module_is_entropy():
    g = _directed_clique_pair()
    from sigbench.signals.classic import pagerank
    pi = pagerank(g).values.ravel()
    entropy = -np.sum(pi * np.log2(pi))
    assert map_equation_codelength(g, np.zeros(8, dtype=int)) == \
        pytest.approx(entropy, abs=1e-9)


def test_infomap_beats_singletons():
    for seed in range(5):
        edges = random_graph(30, 0.1, seed + 50)
        edges = [(u, v) for u, v in edges] + [(v, u) for u, v in edges[:10]]
        g = build_graph(30, edges)
        p = infomap(g, seed=seed)
        singles = map_equation_codelength(g, np.arange(30))
        assert p.quality <= singles + 1e-9


def test_community_features_two_cliques(two_k5_bridge):
    p = louvain(two_k5_bridge, seed=1)
    sig = community_features(p, two_k5_bridge)
    assert sig.column_names == ["louvain.code", "louvain.size", "louvain.intra"]
    assert set(sig.values[:, 1]) == {5.0}
    # bridge endpoint: 4 intra edges of 5 incident
    assert sig.values[0, 2] == pytest.approx(4 / 5)
    assert sig.values[1, 2] == pytest.approx(1.0)


def test_community_features_empty_graph():
    g = Graph(["a", "b"], np.array([], dtype=np.int64), np.array([], dtype=np.int64))
    p = louvain(g, seed=0)
    sig = community_features(p, g)
    assert sig.values[:, 1].tolist() == [1.0, 1.0]
    assert sig.values[:, 2].tolist() == [0.0, 0.0]
