"""Directed transaction graph: loading, views, components, edge perturbation.

Nodes are stored under dense indices ``[0, n)`` with a bijective map to the
external ids used by the on-disk files. Edge lists are immutable after
construction; derived structures (CSR adjacency, undirected view, component
labels) are built lazily and cached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rng import hash_u64


class GraphParseError(ValueError):
    """Malformed edge or node file, annotated with the offending line."""


@dataclass(frozen=True)
class PerturbationSpec:
    """Edge-removal perturbation: remove a ``rho`` fraction of edges."""

    rho: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0,1], got {self.rho}")


@dataclass(frozen=True)
class ComponentLabels:
    """Connected-component partition of the node set (undirected sense)."""

    labels: np.ndarray
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.sizes)


class _CSR:
    """Compact adjacency: ``indices[indptr[v]:indptr[v+1]]`` are v's neighbors."""

    __slots__ = ("indptr", "indices")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        self.indptr = indptr
        self.indices = indices

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray, sort_rows: bool = True) -> _CSR:
    order = np.argsort(src, kind="stable")
    indices = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    if sort_rows:
        # sorted rows enable binary-search membership tests in the walk kernels
        for_sorted = np.lexsort((indices, np.repeat(np.arange(n), np.diff(indptr))))
        indices = indices[for_sorted]
    return _CSR(indptr, indices)


class Graph:
    """Immutable directed graph over dense node indices.

    Parameters
    ----------
    external_ids : sequence of str
        External id for each dense index (bijective).
    src, dst : int arrays
        Edge endpoints as dense indices, order preserved from the source file.
    directed : bool
        False marks an undirected view (each unordered pair stored once).
    """

    def __init__(self, external_ids, src, dst, directed: bool = True):
        ids = [str(x) for x in external_ids]
        if len(set(ids)) != len(ids):
            raise GraphParseError("duplicate external node ids")
        self.external_ids: tuple[str, ...] = tuple(ids)
        self.id_to_index: dict[str, int] = {x: i for i, x in enumerate(ids)}
        self.n = len(ids)
        self.src = np.ascontiguousarray(src, dtype=np.int64)
        self.dst = np.ascontiguousarray(dst, dtype=np.int64)
        if self.src.shape != self.dst.shape:
            raise ValueError("src/dst length mismatch")
        if self.m and (self.src.min() < 0 or self.dst.min() < 0
                       or max(self.src.max(), self.dst.max()) >= self.n):
            raise GraphParseError("edge endpoint out of range")
        self.directed = directed
        self.src.flags.writeable = False
        self.dst.flags.writeable = False
        self._cache: dict = {}

    # -- basic accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.src)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, n={self.n}, m={self.m})"

    # -- adjacency ----------------------------------------------------------

    @property
    def out_adj(self) -> _CSR:
        if "out" not in self._cache:
            self._cache["out"] = _build_csr(self.n, self.src, self.dst)
        return self._cache["out"]

    @property
    def in_adj(self) -> _CSR:
        if "in" not in self._cache:
            self._cache["in"] = _build_csr(self.n, self.dst, self.src)
        return self._cache["in"]

    @property
    def adj(self) -> _CSR:
        """Symmetric adjacency of the undirected view (both directions present)."""
        if "sym" not in self._cache:
            u = self.undirected()
            s = np.concatenate([u.src, u.dst])
            d = np.concatenate([u.dst, u.src])
            keep = np.ones(len(s), dtype=bool)
            keep[len(u.src):] = u.src != u.dst  # do not double self-loops
            self._cache["sym"] = _build_csr(self.n, s[keep], d[keep])
        return self._cache["sym"]

    def degrees_total(self) -> np.ndarray:
        """In-degree + out-degree (equals incident-edge count on directed input)."""
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.src, 1)
        np.add.at(deg, self.dst, 1)
        if self.directed:
            return deg
        # undirected view: each edge contributes once per endpoint, loops twice
        return deg

    # -- views ---------------------------------------------------------------

    def undirected(self) -> "Graph":
        if not self.directed:
            return self
        if "und" not in self._cache:
            self._cache["und"] = undirected_view(self)
        return self._cache["und"]

    def components(self) -> ComponentLabels:
        if "comp" not in self._cache:
            self._cache["comp"] = connected_components(self)
        return self._cache["comp"]


def load_edge_list(path, node_ids=None) -> Graph:
    """Load a two-column delimited edge file into a directed :class:`Graph`.

    An optional one-line header is skipped. When ``node_ids`` is given (the
    bound feature table's id order) the dense indexing follows it and any
    edge id outside that universe is an error; otherwise dense indices are
    assigned by first appearance in the file.
    """
    path = Path(path)
    srcs: list[str] = []
    dsts: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            for sep in (",", "\t", ";"):
                if sep in line:
                    parts = [p.strip() for p in line.split(sep)]
                    break
            else:
                parts = line.split()
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise GraphParseError(f"{path}:{lineno}: expected two columns, got {line!r}")
            if lineno == 1 and not _looks_like_ids(parts, node_ids):
                continue  # header row
            srcs.append(parts[0])
            dsts.append(parts[1])
    if not srcs:
        raise GraphParseError(f"{path}: empty graph")

    if node_ids is not None:
        ids = [str(x) for x in node_ids]
        index = {x: i for i, x in enumerate(ids)}
        try:
            src = np.fromiter((index[s] for s in srcs), dtype=np.int64, count=len(srcs))
            dst = np.fromiter((index[d] for d in dsts), dtype=np.int64, count=len(dsts))
        except KeyError as exc:
            raise GraphParseError(
                f"{path}: edge references id {exc.args[0]!r} absent from the bound node table"
            ) from None
    else:
        index = {}
        for tok in srcs:
            index.setdefault(tok, len(index))
        for tok in dsts:
            index.setdefault(tok, len(index))
        ids = list(index)
        src = np.fromiter((index[s] for s in srcs), dtype=np.int64, count=len(srcs))
        dst = np.fromiter((index[d] for d in dsts), dtype=np.int64, count=len(dsts))
    return Graph(ids, src, dst, directed=True)


def _looks_like_ids(parts, node_ids) -> bool:
    """Heuristic: the first row is data unless it looks like a header.

    With a bound id universe a header is assumed only when neither token is
    a known id (so malformed data rows still surface as errors); otherwise
    any alphabetic token marks a header (Elliptic's ``txId1,txId2``).
    """
    if node_ids is not None:
        known = {str(x) for x in node_ids}
        return parts[0] in known or parts[1] in known
    return not any(any(ch.isalpha() for ch in p) for p in parts)


def undirected_view(g: Graph) -> Graph:
    """Collapse reciprocal/duplicate directed pairs into single undirected edges.

    Each unordered pair appears exactly once, in first-occurrence order.
    Idempotent on already-undirected graphs.
    """
    if g.m == 0:
        return Graph(g.external_ids, g.src[:0], g.dst[:0], directed=False)
    lo = np.minimum(g.src, g.dst)
    hi = np.maximum(g.src, g.dst)
    key = lo * np.int64(g.n) + hi
    _, first = np.unique(key, return_index=True)
    first.sort()
    return Graph(g.external_ids, lo[first], hi[first], directed=False)


def reciprocal_pair_count(g: Graph) -> int:
    """Number of unordered pairs {u,v} present in both directions (u != v)."""
    fwd = set(zip(g.src.tolist(), g.dst.tolist()))
    seen = set()
    for u, v in fwd:
        if u != v and (v, u) in fwd and (v, u) not in seen:
            seen.add((u, v))
    return len(seen)


def connected_components(g: Graph) -> ComponentLabels:
    """Label connected components of the undirected view.

    Component labels are ordered by the lowest dense index they contain, so
    the labelling is stable under permutations of the edge list.
    """
    adj = g.adj
    labels = np.full(g.n, -1, dtype=np.int64)
    current = 0
    for start in range(g.n):
        if labels[start] != -1:
            continue
        labels[start] = current
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            neigh = _gather_neighbors(adj, frontier)
            neigh = neigh[labels[neigh] == -1]
            if neigh.size == 0:
                break
            neigh = np.unique(neigh)
            labels[neigh] = current
            frontier = neigh
        current += 1
    sizes = np.bincount(labels, minlength=current)
    return ComponentLabels(labels=labels, sizes=sizes)


def _gather_neighbors(adj: _CSR, nodes: np.ndarray) -> np.ndarray:
    counts = adj.indptr[nodes + 1] - adj.indptr[nodes]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    out = np.empty(total, dtype=np.int64)
    offs = np.concatenate([[0], np.cumsum(counts)])
    # ranges are gathered with one repeat/cumsum pass instead of a python loop
    starts = adj.indptr[nodes]
    idx = np.repeat(starts - offs[:-1], counts) + np.arange(total)
    out[:] = adj.indices[idx]
    return out


def remove_edges(g: Graph, spec: PerturbationSpec) -> Graph:
    """Remove ``round(rho * m)`` edges uniformly without replacement.

    Sampling ranks edges by a counter-based hash keyed on (rho, seed, edge
    index), so the surviving subset is identical across runs and thread
    counts, and survivors keep their original relative order.
    """
    m = g.m
    n_remove = int(np.floor(spec.rho * m + 0.5))  # round-half-up
    if n_remove == 0:
        return Graph(g.external_ids, g.src, g.dst, directed=g.directed)
    rho_key = np.uint64(int(round(spec.rho * 10**9)))
    scores = hash_u64(rho_key, np.uint64(spec.seed), np.arange(m, dtype=np.uint64))
    doomed = np.argsort(scores, kind="stable")[:n_remove]
    keep = np.ones(m, dtype=bool)
    keep[doomed] = False
    return Graph(g.external_ids, g.src[keep], g.dst[keep], directed=g.directed)
