"""Centrality and cohesion signal kernels.

All kernels are deterministic functions of the graph (plus the fixed
protocol seed where sampling is involved) and return node-aligned
:class:`NodeSignal` columns. Directed/undirected view usage follows the
per-signal generation parameters; cohesion kernels ignore self-loops.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .. import PROTOCOL_SEED
from ..graph import Graph
from . import NodeSignal

PAGERANK_ALPHA = 0.85
PAGERANK_MAX_ITER = 100
PAGERANK_TOL = 1e-8
EIGEN_MAX_ITER = 1000
EIGEN_TOL = 1e-6
BETWEENNESS_MAX_PIVOTS = 2000


def _sym_matrix(g: Graph) -> sp.csr_matrix:
    adj = g.adj
    n = g.n
    indptr, indices = adj.indptr, adj.indices
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def _simple_neighbors(g: Graph):
    """Sorted undirected neighbor lists with self-loops dropped."""
    adj = g.adj
    out = []
    for v in range(g.n):
        nb = adj.neighbors(v)
        out.append(nb[nb != v])
    return out


def degree_centrality(g: Graph) -> NodeSignal:
    """Raw incident-edge count; in-degree + out-degree on directed input."""
    deg = g.degrees_total().astype(np.float64)
    return NodeSignal("degree", "Centrality", ["count"], deg[:, None],
                      directedness="directed" if g.directed else "undirected")


def pagerank(g: Graph, alpha: float = PAGERANK_ALPHA,
             max_iter: int = PAGERANK_MAX_ITER, tol: float = PAGERANK_TOL) -> NodeSignal:
    """Power-iteration PageRank on the directed graph.

    Dangling-node mass is redistributed uniformly; iteration stops when the
    L1 change drops below ``tol`` or after ``max_iter`` sweeps (recorded in
    the signal meta).
    """
    n = g.n
    out_deg = np.zeros(n, dtype=np.float64)
    np.add.at(out_deg, g.src, 1.0)
    # transition matrix P[j, i] = 1/outdeg(i) for edge i->j, as csr for matvec
    weights = 1.0 / out_deg[g.src]
    P = sp.csr_matrix((weights, (g.dst, g.src)), shape=(n, n))
    dangling = out_deg == 0
    x = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dangling_mass = x[dangling].sum()
        x_new = alpha * (P @ x + dangling_mass / n) + (1.0 - alpha) / n
        if np.abs(x_new - x).sum() < tol:
            x = x_new
            converged = True
            break
        x = x_new
    return NodeSignal("pagerank", "Centrality", ["score"], x[:, None],
                      directedness="directed",
                      meta={"converged": converged, "iterations": iterations})


def betweenness_approx(g: Graph, max_pivots: int = BETWEENNESS_MAX_PIVOTS,
                       seed: int = PROTOCOL_SEED) -> NodeSignal:
    """Brandes betweenness from min(max_pivots, |V|) sampled sources.

    Sources are sampled without replacement with the fixed protocol seed so
    the signal does not vary across evaluation seeds; with |V| <= max_pivots
    every node is a source and the result is exact. Accumulated pair counts
    are rescaled by |V| / #pivots and halved (undirected double counting).
    """
    und = g.undirected()
    adj = und.adj
    n = und.n
    k = min(max_pivots, n)
    if k == n:
        pivots = np.arange(n)
        exact = True
    else:
        pivots = np.random.default_rng(seed).choice(n, size=k, replace=False)
        exact = False
    btw = np.zeros(n, dtype=np.float64)
    indptr, indices = adj.indptr, adj.indices
    for s in pivots:
        btw += _brandes_from_source(int(s), n, indptr, indices)
    btw *= n / k
    btw /= 2.0  # each unordered pair counted from both endpoints
    return NodeSignal("betweenness", "Centrality", ["score"], btw[:, None],
                      meta={"pivots": int(k), "exact": exact})


def _brandes_from_source(s: int, n: int, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n, dtype=np.float64)
    dist[s] = 0
    sigma[s] = 1.0
    levels = [np.array([s], dtype=np.int64)]
    frontier = levels[0]
    d = 0
    while frontier.size:
        counts = indptr[frontier + 1] - indptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        offs = np.cumsum(counts)
        pos = np.repeat(indptr[frontier] - (offs - counts), counts) + np.arange(total)
        ws = indices[pos]
        us = np.repeat(frontier, counts)
        fresh = dist[ws] == -1
        if fresh.any():
            new_nodes = np.unique(ws[fresh])
            dist[new_nodes] = d + 1
        onpath = dist[ws] == d + 1
        np.add.at(sigma, ws[onpath], sigma[us[onpath]])
        frontier = np.unique(ws[fresh]) if fresh.any() else np.empty(0, dtype=np.int64)
        if frontier.size:
            levels.append(frontier)
        d += 1
    delta = np.zeros(n, dtype=np.float64)
    for level in reversed(levels[1:]):
        counts = indptr[level + 1] - indptr[level]
        total = int(counts.sum())
        offs = np.cumsum(counts)
        pos = np.repeat(indptr[level] - (offs - counts), counts) + np.arange(total)
        us = indices[pos]           # candidate predecessors
        ws = np.repeat(level, counts)
        mask = dist[us] == dist[ws] - 1
        contrib = sigma[us[mask]] / sigma[ws[mask]] * (1.0 + delta[ws[mask]])
        np.add.at(delta, us[mask], contrib)
    delta[s] = 0.0
    return delta


def eigenvector_centrality(g: Graph, max_iter: int = EIGEN_MAX_ITER,
                           tol: float = EIGEN_TOL) -> NodeSignal:
    """Per-component dominant eigenvector of the undirected adjacency.

    Shifted power iteration (x <- x + Ax keeps bipartite components from
    oscillating) from a uniform start, L2-normalized per component;
    singleton components get 0. Non-converged components are flagged in
    meta and the last iterate is returned.
    """
    und = g.undirected()
    A = _sym_matrix(und)
    comp = und.components()
    labels, sizes = comp.labels, comp.sizes
    n = und.n
    x = np.full(n, 1.0, dtype=np.float64)
    _normalize_per_component(x, labels, len(sizes))
    unconverged = sizes > 1
    for _ in range(max_iter):
        if not unconverged.any():
            break
        x_new = x + A @ x
        _normalize_per_component(x_new, labels, len(sizes))
        diff = np.zeros(len(sizes))
        np.add.at(diff, labels, np.abs(x_new - x))
        unconverged = (diff >= tol) & (sizes > 1)
        x = x_new
    x[sizes[labels] == 1] = 0.0
    return NodeSignal("eigenvector", "Centrality", ["score"], x[:, None],
                      meta={"non_converged_components": int(unconverged.sum())})


def _normalize_per_component(x: np.ndarray, labels: np.ndarray, n_comp: int) -> None:
    sq = np.zeros(n_comp)
    np.add.at(sq, labels, x * x)
    norm = np.sqrt(sq)
    norm[norm == 0] = 1.0
    x /= norm[labels]


def bfs_distances(indptr: np.ndarray, indices: np.ndarray, source: int, n: int) -> np.ndarray:
    """Unweighted distances from ``source``; unreachable nodes get -1."""
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        counts = indptr[frontier + 1] - indptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        offs = np.cumsum(counts)
        pos = np.repeat(indptr[frontier] - (offs - counts), counts) + np.arange(total)
        ws = indices[pos]
        fresh = np.unique(ws[dist[ws] == -1])
        if fresh.size == 0:
            break
        dist[fresh] = d + 1
        frontier = fresh
        d += 1
    return dist


def closeness_centrality(g: Graph) -> NodeSignal:
    """(m-1) / sum of distances within each node's component; isolated nodes 0."""
    und = g.undirected()
    adj = und.adj
    comp = und.components()
    n = und.n
    out = np.zeros(n, dtype=np.float64)
    csize = comp.sizes[comp.labels]
    for v in range(n):
        if csize[v] <= 1:
            continue
        dist = bfs_distances(adj.indptr, adj.indices, v, n)
        total = dist[dist > 0].sum()
        out[v] = (csize[v] - 1) / total if total else 0.0
    return NodeSignal("closeness", "Centrality", ["score"], out[:, None])


def triangle_count(g: Graph) -> NodeSignal:
    """Exact per-node triangle participation counts."""
    tri = _per_node_triangles(g)
    return NodeSignal("triangles", "Cohesion", ["count"], tri.astype(np.float64)[:, None])


def _per_node_triangles(g: Graph) -> np.ndarray:
    und = g.undirected()
    neighbors = _simple_neighbors(und)
    tri2 = np.zeros(und.n, dtype=np.int64)  # 2x participation per node
    for u in range(und.n):
        nb_u = neighbors[u]
        above = nb_u[nb_u > u]
        for v in above:
            common = np.intersect1d(nb_u, neighbors[v], assume_unique=True)
            k = len(common)
            if k:
                tri2[u] += k
                tri2[v] += k
    # endpoints of two of a triangle's three edges each count it twice
    return tri2 // 2


def clustering_coefficient(g: Graph) -> NodeSignal:
    """triangles(v) / C(deg(v), 2); degree-below-2 nodes get 0."""
    und = g.undirected()
    tri = _per_node_triangles(und)
    deg = np.array([len(nb) for nb in _simple_neighbors(und)], dtype=np.float64)
    pairs = deg * (deg - 1) / 2.0
    cc = np.divide(tri, pairs, out=np.zeros(und.n), where=pairs > 0)
    return NodeSignal("clustering", "Cohesion", ["coef"], cc[:, None])


def core_number(g: Graph) -> NodeSignal:
    """k-core indices via minimum-degree peeling (self-loops ignored)."""
    und = g.undirected()
    neighbors = _simple_neighbors(und)
    n = und.n
    deg = np.array([len(nb) for nb in neighbors], dtype=np.int64)
    core = deg.copy()
    max_deg = int(deg.max()) if n else 0
    # bin-sorted peeling (Batagelj & Zaversnik layout)
    bin_start = np.zeros(max_deg + 2, dtype=np.int64)
    np.add.at(bin_start, deg + 1, 1)
    np.cumsum(bin_start, out=bin_start)
    pos = np.argsort(deg, kind="stable")
    vert = pos.copy()
    node_pos = np.empty(n, dtype=np.int64)
    node_pos[vert] = np.arange(n)
    next_free = bin_start[:-1].copy()
    for i in range(n):
        v = vert[i]
        core[v] = deg[v]
        for u in neighbors[v]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu = node_pos[u]
                pw = next_free[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    node_pos[u], node_pos[w] = pw, pu
                next_free[du] += 1
                deg[u] -= 1
    return NodeSignal("core_number", "Cohesion", ["k"], core.astype(np.float64)[:, None])


def average_neighbor_clustering(g: Graph) -> NodeSignal:
    """Mean clustering coefficient over each node's neighbors; isolated nodes 0."""
    und = g.undirected()
    cc = clustering_coefficient(und).values[:, 0]
    neighbors = _simple_neighbors(und)
    out = np.zeros(und.n, dtype=np.float64)
    for v, nb in enumerate(neighbors):
        if len(nb):
            out[v] = cc[nb].mean()
    return NodeSignal("avg_neighbor_clustering", "Cohesion", ["mean"], out[:, None])
