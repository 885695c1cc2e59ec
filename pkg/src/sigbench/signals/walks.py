"""Second-order biased random walks (node2vec) with counter-based streams.

Every walk draws its randomness from a stateless hash of
(seed, start node, walk index, step), so corpora are identical no matter
how walk generation is scheduled. DeepWalk is the unbiased p=q=1 case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph
from ..rng import hash_unit


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 20
    p: float = 1.0
    q: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.walks_per_node < 1 or self.walk_length < 2:
            raise ValueError("walks_per_node >= 1 and walk_length >= 2 required")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")


@dataclass
class WalkCorpus:
    """Padded walk matrix; row i is walk i, unused steps are -1."""

    walks: np.ndarray   # (n_walks, walk_length) int64
    lengths: np.ndarray

    def __len__(self):
        return len(self.walks)

    def sequences(self):
        for row, ln in zip(self.walks, self.lengths):
            yield row[:ln]


def generate_walks(g: Graph, cfg: WalkConfig) -> WalkCorpus:
    """walks_per_node truncated walks from every node of the undirected view.

    Dead ends terminate early; an isolated start yields the length-1 walk
    containing only itself.
    """
    und = g.undirected()
    adj = und.adj
    indptr, indices = adj.indptr, adj.indices
    n = und.n
    W, L = cfg.walks_per_node, cfg.walk_length
    starts = np.repeat(np.arange(n, dtype=np.int64), W)
    walk_idx = np.tile(np.arange(W, dtype=np.int64), n)
    total = n * W
    walks = np.full((total, L), -1, dtype=np.int64)
    walks[:, 0] = starts
    lengths = np.ones(total, dtype=np.int64)

    biased = not (cfg.p == 1.0 and cfg.q == 1.0)
    edge_keys = None
    if biased:
        edge_keys = np.sort(adj.indices + indptr_rows(indptr) * np.int64(n))

    cur = starts.copy()
    prev = np.full(total, -1, dtype=np.int64)
    active = np.ones(total, dtype=bool)
    for step in range(1, L):
        deg = indptr[cur + 1] - indptr[cur]
        active &= deg > 0
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        u = hash_unit(np.uint64(cfg.seed), starts[idx], walk_idx[idx],
                      np.uint64(step))
        if not biased or step == 1:
            choice = indptr[cur[idx]] + np.minimum(
                (u * deg[idx]).astype(np.int64), deg[idx] - 1)
            nxt = indices[choice]
        else:
            nxt = _biased_step(indptr, indices, edge_keys, n,
                               cur[idx], prev[idx], u, cfg.p, cfg.q)
        prev[idx] = cur[idx]
        cur[idx] = nxt
        walks[idx, step] = nxt
        lengths[idx] = step + 1
    return WalkCorpus(walks=walks, lengths=lengths)


def indptr_rows(indptr: np.ndarray) -> np.ndarray:
    """Row index of every position in a CSR ``indices`` array."""
    counts = np.diff(indptr)
    return np.repeat(np.arange(len(counts), dtype=np.int64), counts)


def _biased_step(indptr, indices, edge_keys, n, cur, prev, u, p, q):
    """One node2vec transition for a batch of walks with known predecessors."""
    counts = indptr[cur + 1] - indptr[cur]
    total = int(counts.sum())
    offs = np.cumsum(counts)
    row_of = np.repeat(np.arange(len(cur)), counts)
    pos = np.repeat(indptr[cur] - (offs - counts), counts) + np.arange(total)
    cand = indices[pos]
    w = np.full(total, 1.0 / q)
    back = cand == prev[row_of]
    w[back] = 1.0 / p
    # distance-1 candidates: (prev, cand) must be an edge of the graph
    key = prev[row_of].astype(np.int64) * np.int64(n) + cand
    hit = np.searchsorted(edge_keys, key)
    hit = np.minimum(hit, len(edge_keys) - 1)
    shared = (edge_keys[hit] == key) & ~back
    w[shared] = 1.0
    # segment-wise cumulative weights, then inverse-CDF sample per walk
    cw = np.cumsum(w)
    seg_start = np.concatenate([[0.0], cw[offs[:-1] - 1]])
    totals = cw[offs - 1] - seg_start
    target = seg_start + u * totals
    sel = np.searchsorted(cw, target, side="right")
    sel = np.minimum(sel, offs - 1)
    first = offs - counts
    sel = np.maximum(sel, first)
    return cand[sel]
