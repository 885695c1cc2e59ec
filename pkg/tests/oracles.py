"""Brute-force reference implementations used to freeze expected values.

Everything here is written for clarity over speed and stays independent of
the library code paths it checks: plain BFS closures, O(n^3) enumerations,
dense power iterations.
"""

from __future__ import annotations

import itertools

import numpy as np


def adjacency_sets(n, edges):
    """Undirected simple adjacency sets from an edge list."""
    adj = [set() for _ in range(n)]
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def bfs_all_distances(n, edges):
    """(n, n) matrix of unweighted distances, -1 if unreachable."""
    adj = adjacency_sets(n, edges)
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        queue = [s]
        while queue:
            nxt = []
            for v in queue:
                for u in adj[v]:
                    if dist[s, u] == -1:
                        dist[s, u] = dist[s, v] + 1
                        nxt.append(u)
            queue = nxt
    return dist


def components_oracle(n, edges):
    """Component labels via BFS closure from every node."""
    dist = bfs_all_distances(n, edges)
    labels = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        if labels[v] == -1:
            labels[dist[v] >= 0] = nxt
            nxt += 1
    return labels


def closeness_oracle(n, edges):
    dist = bfs_all_distances(n, edges)
    out = np.zeros(n)
    for v in range(n):
        reach = np.flatnonzero(dist[v] > 0)
        if len(reach):
            out[v] = len(reach) / dist[v, reach].sum()
    return out


def triangles_oracle(n, edges):
    """O(n^3) triple enumeration."""
    adj = adjacency_sets(n, edges)
    tri = np.zeros(n, dtype=np.int64)
    for a, b, c in itertools.combinations(range(n), 3):
        if b in adj[a] and c in adj[a] and c in adj[b]:
            tri[a] += 1
            tri[b] += 1
            tri[c] += 1
    return tri


def clustering_oracle(n, edges):
    adj = adjacency_sets(n, edges)
    tri = triangles_oracle(n, edges)
    out = np.zeros(n)
    for v in range(n):
        d = len(adj[v])
        if d >= 2:
            out[v] = tri[v] / (d * (d - 1) / 2)
    return out


def core_number_oracle(n, edges):
    """Peeling by repeated filtering."""
    adj = adjacency_sets(n, edges)
    alive = set(range(n))
    core = np.zeros(n, dtype=np.int64)
    k = 0
    while alive:
        while True:
            victims = [v for v in alive
                       if len(adj[v] & alive) <= k]
            if not victims:
                break
            for v in victims:
                core[v] = k
                alive.discard(v)
        k += 1
    return core


def betweenness_oracle(n, edges):
    """Pair-by-pair shortest-path enumeration (unnormalized pair counts)."""
    adj = adjacency_sets(n, edges)
    dist = bfs_all_distances(n, edges)
    # count shortest paths between s and t passing through v, per pair
    n_paths = np.zeros((n, n))
    for s in range(n):
        order = np.argsort(dist[s])
        n_paths[s, s] = 1
        for v in order:
            if dist[s, v] <= 0:
                continue
            n_paths[s, v] = sum(n_paths[s, u] for u in adj[v]
                                if dist[s, u] == dist[s, v] - 1)
    btw = np.zeros(n)
    for s, t in itertools.combinations(range(n), 2):
        if dist[s, t] <= 0 or n_paths[s, t] == 0:
            continue
        for v in range(n):
            if v in (s, t):
                continue
            if dist[s, v] + dist[v, t] == dist[s, t]:
                btw[v] += n_paths[s, v] * n_paths[v, t] / n_paths[s, t]
    return btw


def pagerank_oracle(n, edges, alpha=0.85, iters=200):
    """Dense power iteration with uniform dangling redistribution."""
    P = np.zeros((n, n))
    out_deg = np.zeros(n)
    for u, v in edges:
        out_deg[u] += 1
    for u, v in edges:
        P[v, u] += 1.0 / out_deg[u]
    dangling = out_deg == 0
    x = np.full(n, 1.0 / n)
    for _ in range(iters):
        x = alpha * (P @ x + x[dangling].sum() / n) + (1 - alpha) / n
    return x


def eigenvector_oracle(n, edges, max_iter=1000, tol=1e-6):
    """Dense shifted power iteration matching the published procedure:
    uniform start, x <- x + Ax, per-component L2 normalization."""
    A = np.zeros((n, n))
    for u, v in edges:
        if u != v:
            A[u, v] = 1.0
            A[v, u] = 1.0
    labels = components_oracle(n, edges)
    x = np.ones(n)
    for c in np.unique(labels):
        mask = labels == c
        x[mask] /= np.linalg.norm(x[mask])
    for _ in range(max_iter):
        x_new = x + A @ x
        for c in np.unique(labels):
            mask = labels == c
            norm = np.linalg.norm(x_new[mask])
            if norm > 0:
                x_new[mask] /= norm
        if np.abs(x_new - x).sum() < tol:
            x = x_new
            break
        x = x_new
    sizes = np.bincount(labels)
    x[sizes[labels] == 1] = 0.0
    return x


def modularity_oracle(n, edges, assignment):
    """Textbook Newman-Girvan modularity of a partition (simple graph)."""
    m = len(edges)
    if m == 0:
        return 0.0
    deg = np.zeros(n)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    q = 0.0
    for u, v in edges:
        if assignment[u] == assignment[v]:
            q += 1.0 / m
    for c in np.unique(assignment):
        q -= (deg[assignment == c].sum() / (2 * m)) ** 2
    return q


def best_partition_exhaustive(n, edges):
    """Argmax-modularity partition by enumerating all set partitions."""
    best_q, best = -np.inf, None
    for part in _set_partitions(list(range(n))):
        assignment = np.zeros(n, dtype=np.int64)
        for ci, block in enumerate(part):
            for v in block:
                assignment[v] = ci
        q = modularity_oracle(n, edges, assignment)
        if q > best_q:
            best_q, best = q, assignment
    return best, best_q


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def random_graph(n, p, seed):
    """Erdos-Renyi edge list (undirected, no loops)."""
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return edges


def adjusted_rand_index(a, b) -> float:
    """Adjusted agreement between two partitions."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = len(a)
    ka, kb = a.max() + 1, b.max() + 1
    table = np.zeros((ka, kb))
    for x, y in zip(a, b):
        table[x, y] += 1

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_ij = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))
