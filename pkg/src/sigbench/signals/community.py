"""Community detection: Louvain, Leiden refinement, and Infomap.

Louvain and Leiden optimize Newman-Girvan modularity (resolution 1.0) on
the undirected view; Infomap minimizes the two-level map-equation
codelength over PageRank-style visit rates on the directed graph. All
three are deterministic given the seed that shuffles node visiting order.
"""

from __future__ import annotations

import numpy as np

from ..graph import Graph
from . import CommunityPartition, NodeSignal


# --------------------------------------------------------------------------
# weighted undirected multigraph used during aggregation
# --------------------------------------------------------------------------

class _WGraph:
    """Adjacency-list weighted graph; self-loop weight w adds 2w to degree."""

    def __init__(self, n, edges):
        self.n = n
        self.adj = [dict() for _ in range(n)]
        self.loop = np.zeros(n)
        for u, v, w in edges:
            if u == v:
                self.loop[u] += w
            else:
                self.adj[u][v] = self.adj[u].get(v, 0.0) + w
                self.adj[v][u] = self.adj[v].get(u, 0.0) + w
        self.deg = np.array([sum(a.values()) for a in self.adj]) + 2.0 * self.loop
        self.total_weight = self.deg.sum() / 2.0  # == m for simple graphs

    @classmethod
    def from_graph(cls, g: Graph) -> "_WGraph":
        und = g.undirected()
        return cls(und.n, zip(und.src.tolist(), und.dst.tolist(),
                              [1.0] * und.m))


def modularity(g: Graph, assignment) -> float:
    """Newman-Girvan modularity of a partition on the undirected view."""
    und = g.undirected()
    assignment = np.asarray(assignment)
    m = und.m
    if m == 0:
        return 0.0
    wg = _WGraph.from_graph(und)
    return _modularity_w(wg, assignment)


def _modularity_w(wg: _WGraph, assignment) -> float:
    two_m = 2.0 * wg.total_weight
    if two_m == 0:
        return 0.0
    n_comm = int(assignment.max()) + 1
    in2 = np.zeros(n_comm)
    tot = np.zeros(n_comm)
    np.add.at(tot, assignment, wg.deg)
    for u in range(wg.n):
        cu = assignment[u]
        in2[cu] += 2.0 * wg.loop[u]
        for v, w in wg.adj[u].items():
            if assignment[v] == cu:
                in2[cu] += w  # each intra edge visited from both endpoints
    return float(np.sum(in2 / two_m - (tot / two_m) ** 2))


def _local_move_pass(wg: _WGraph, comm, tot, order, resolution=1.0) -> bool:
    """One sweep of best-gain node moves; returns True if anything moved."""
    two_m = 2.0 * wg.total_weight
    moved = False
    for v in order:
        c0 = comm[v]
        k_v = wg.deg[v]
        tot[c0] -= k_v
        links = {}
        for u, w in wg.adj[v].items():
            links[comm[u]] = links.get(comm[u], 0.0) + w
        best_c = c0
        best_gain = links.get(c0, 0.0) - resolution * tot[c0] * k_v / two_m
        for c in sorted(links):
            gain = links[c] - resolution * tot[c] * k_v / two_m
            if gain > best_gain + 1e-12:
                best_c, best_gain = c, gain
        comm[v] = best_c
        tot[best_c] += k_v
        if best_c != c0:
            moved = True
    return moved


def _compress_labels(assignment: np.ndarray) -> np.ndarray:
    """Relabel communities contiguously, ordered by lowest member index."""
    seen = {}
    out = np.empty_like(assignment)
    for i, c in enumerate(assignment):
        if c not in seen:
            seen[c] = len(seen)
        out[i] = seen[c]
    return out


def louvain(g: Graph, seed: int = 0) -> CommunityPartition:
    """Greedy modularity maximization with seeded node-sweep order."""
    und = g.undirected()
    if und.m == 0:
        return CommunityPartition(np.arange(und.n), 0.0, algorithm="louvain")
    wg = _WGraph.from_graph(und)
    rng = np.random.default_rng(seed)
    flat = np.arange(wg.n)
    level_graph = wg
    while True:
        comm = np.arange(level_graph.n)
        tot = level_graph.deg.copy()
        order = rng.permutation(level_graph.n)
        any_move = False
        while _local_move_pass(level_graph, comm, tot, order):
            any_move = True
        if not any_move:
            break
        comm = _compress_labels(comm)
        flat = comm[flat]
        if int(comm.max()) + 1 == level_graph.n:
            break
        level_graph, _ = _aggregate_by(level_graph, comm)
    flat = _compress_labels(flat)
    return CommunityPartition(flat, _modularity_w(wg, flat), algorithm="louvain")


def _aggregate_by(wg: _WGraph, labels):
    k = int(labels.max()) + 1
    loop = np.zeros(k)
    acc = {}
    for u in range(wg.n):
        cu = labels[u]
        loop[cu] += wg.loop[u]
        for v, w in wg.adj[u].items():
            if u < v:
                cv = labels[v]
                if cu == cv:
                    loop[cu] += w
                else:
                    key = (min(cu, cv), max(cu, cv))
                    acc[key] = acc.get(key, 0.0) + w
    edges = [(a, b, w) for (a, b), w in acc.items()]
    edges.extend((c, c, w) for c, w in enumerate(loop) if w)
    return _WGraph(k, edges), labels


def leiden(g: Graph, seed: int = 0, resolution: float = 1.0) -> CommunityPartition:
    """Louvain plus a refinement phase guaranteeing connected communities.

    The partition starts from the seeded Louvain result and is then
    improved through refine/aggregate/move rounds that only ever accept
    non-worsening moves, so its modularity never falls below Louvain's. A
    final pass splits any community that does not induce a connected
    subgraph (splitting such a community cannot lower modularity).
    """
    und = g.undirected()
    if und.m == 0:
        return CommunityPartition(np.arange(und.n), 0.0, algorithm="leiden")
    wg = _WGraph.from_graph(und)
    rng = np.random.default_rng(seed)
    comm = louvain(und, seed).assignment.copy()
    for _ in range(10):
        refined = _refine(wg, comm, rng, resolution)
        agg, _ = _aggregate_by(wg, refined)
        agg_comm = np.empty(agg.n, dtype=np.int64)
        for v in range(wg.n):
            agg_comm[refined[v]] = comm[v]
        agg_comm = agg_comm.copy()
        tot = np.zeros(int(agg_comm.max()) + 1)
        np.add.at(tot, agg_comm, agg.deg)
        moved = False
        order = rng.permutation(agg.n)
        while _local_move_pass(agg, agg_comm, tot, order, resolution):
            moved = True
        new_comm = _compress_labels(agg_comm[refined])
        if not moved or np.array_equal(new_comm, comm):
            comm = new_comm
            break
        comm = new_comm
    comm = _split_disconnected(und, comm)
    return CommunityPartition(comm, _modularity_w(wg, comm), algorithm="leiden")


def _refine(wg: _WGraph, comm, rng, resolution=1.0) -> np.ndarray:
    """Merge singletons into adjacent refined groups inside each community."""
    two_m = 2.0 * wg.total_weight
    refined = np.arange(wg.n)
    rtot = wg.deg.copy()
    singleton = np.ones(wg.n, dtype=bool)
    for v in rng.permutation(wg.n):
        if not singleton[v]:
            continue
        links = {}
        for u, w in wg.adj[v].items():
            if comm[u] == comm[v]:
                links[refined[u]] = links.get(refined[u], 0.0) + w
        links.pop(refined[v], None)
        if not links:
            continue
        rtot[refined[v]] -= wg.deg[v]
        best_r, best_gain = None, -1e-12
        for r in sorted(links):
            gain = links[r] - resolution * rtot[r] * wg.deg[v] / two_m
            if gain > best_gain:
                best_r, best_gain = r, gain
        if best_r is not None and best_gain >= 0.0:
            refined[v] = best_r
            singleton[v] = False
            singleton[best_r] = False
        rtot[refined[v]] += wg.deg[v]
    return _compress_labels(refined)


def _split_disconnected(und: Graph, comm: np.ndarray) -> np.ndarray:
    """Split each community into its connected components."""
    adj = und.adj
    n = und.n
    out = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for start in range(n):
        if out[start] != -1:
            continue
        c = comm[start]
        out[start] = nxt
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj.neighbors(v):
                if out[u] == -1 and comm[u] == c:
                    out[u] = nxt
                    stack.append(u)
        nxt += 1
    return _compress_labels(out)


# --------------------------------------------------------------------------
# Infomap: two-level map equation over teleporting random-walk flows
# --------------------------------------------------------------------------

def _plogp(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out if out.ndim else float(out)


class _FlowNet:
    """Visit rates plus factored transition flows.

    Sparse part holds damped edge-following flow; every node additionally
    spreads ``dense[i]`` uniformly over all ``n_ref`` original positions
    (teleportation and dangling mass), a structure preserved by module
    aggregation.
    """

    def __init__(self, pi, dense, size, n_ref, rows):
        self.pi = pi                  # visit rate per (aggregate) node
        self.dense = dense            # uniformly spread flow mass
        self.size = size              # original nodes represented
        self.n_ref = n_ref
        self.rows = rows              # list[dict]: sparse out-flows
        self.n = len(pi)
        self.cols = [dict() for _ in range(self.n)]
        for u, row in enumerate(rows):
            for v, w in row.items():
                self.cols[v][u] = w
        self.rowsum = np.array([sum(r.values()) for r in rows], dtype=np.float64)

    @classmethod
    def from_graph(cls, g: Graph, alpha: float = 0.85):
        from .classic import pagerank
        n = g.n
        pi = pagerank(g, alpha=alpha).values[:, 0]
        out_deg = np.zeros(n)
        np.add.at(out_deg, g.src, 1.0)
        rows = [dict() for _ in range(n)]
        for u, v in zip(g.src.tolist(), g.dst.tolist()):
            rows[u][v] = rows[u].get(v, 0.0) + alpha * pi[u] / out_deg[u]
        dense = pi * (1.0 - alpha) + np.where(out_deg == 0, pi * alpha, 0.0)
        return cls(pi, dense, np.ones(n, dtype=np.int64), n, rows)


def _codelength_terms(flow: _FlowNet, modules) -> float:
    """Two-level codelength for a module assignment over the flow network."""
    k = int(np.max(modules)) + 1
    q = np.zeros(k)
    p_mod = np.zeros(k)
    sum_pi = np.zeros(k)
    np.add.at(sum_pi, modules, flow.pi)
    d_mod = np.zeros(k)
    np.add.at(d_mod, modules, flow.dense)
    s_mod = np.zeros(k)
    np.add.at(s_mod, modules, flow.rowsum)
    size_mod = np.zeros(k)
    np.add.at(size_mod, modules, flow.size)
    internal = np.zeros(k)
    for u, row in enumerate(flow.rows):
        mu = modules[u]
        for v, w in row.items():
            if modules[v] == mu:
                internal[mu] += w
    q = s_mod - internal + d_mod * (flow.n_ref - size_mod) / flow.n_ref
    q = np.maximum(q, 0.0)
    q_tot = q.sum()
    p_mod = q + sum_pi
    node_term = float(np.sum(_plogp(flow.pi)))
    return float(_plogp(q_tot) - 2.0 * np.sum(_plogp(q)) - node_term + np.sum(_plogp(p_mod)))


def map_equation_codelength(g: Graph, assignment, alpha: float = 0.85) -> float:
    """Codelength (bits per step) of a partition under the two-level map equation."""
    flow = _FlowNet.from_graph(g, alpha=alpha)
    return _codelength_terms(flow, _compress_labels(np.asarray(assignment)))


def infomap(g: Graph, seed: int = 0, alpha: float = 0.85) -> CommunityPartition:
    """Greedy two-level map-equation minimization (Louvain-style moves)."""
    if g.m == 0:
        return CommunityPartition(np.arange(g.n), 0.0, algorithm="infomap")
    base_flow = _FlowNet.from_graph(g, alpha=alpha)
    rng = np.random.default_rng(seed)
    flow = base_flow
    flat = np.arange(g.n)
    while True:
        modules = np.arange(flow.n)
        improved = _infomap_move_pass(flow, modules, rng)
        if not improved:
            break
        modules = _compress_labels(modules)
        flat = modules[flat]
        if int(modules.max()) + 1 == flow.n:
            break
        flow = _aggregate_flow(flow, modules)
    flat = _compress_labels(flat)
    return CommunityPartition(flat, _codelength_terms(base_flow, flat),
                              algorithm="infomap")


def _infomap_move_pass(flow: _FlowNet, modules, rng) -> bool:
    n_ref = flow.n_ref
    k = flow.n
    sum_pi = np.zeros(k)
    np.add.at(sum_pi, modules, flow.pi)
    d_mod = np.zeros(k)
    np.add.at(d_mod, modules, flow.dense)
    s_mod = np.zeros(k)
    np.add.at(s_mod, modules, flow.rowsum)
    size_mod = np.zeros(k, dtype=np.float64)
    np.add.at(size_mod, modules, flow.size)
    internal = np.zeros(k)
    for u, row in enumerate(flow.rows):
        for v, w in row.items():
            if modules[v] == modules[u]:
                internal[modules[u]] += w

    def q_of(m):
        return max(s_mod[m] - internal[m] + d_mod[m] * (n_ref - size_mod[m]) / n_ref, 0.0)

    q = np.array([q_of(m) for m in range(k)])
    q_tot = q.sum()
    improved_any = False
    for _ in range(100):  # sweep passes
        moved = False
        for v in rng.permutation(flow.n):
            m_from = modules[v]
            flows_to = {}
            for u, w in flow.rows[v].items():
                if u != v:
                    flows_to[modules[u]] = flows_to.get(modules[u], 0.0) + w
            flows_from = {}
            for u, w in flow.cols[v].items():
                if u != v:
                    flows_from[modules[u]] = flows_from.get(modules[u], 0.0) + w
            candidates = set(flows_to) | set(flows_from)
            candidates.discard(m_from)
            if not candidates:
                continue
            # current contribution of the two affected modules to L
            def mod_terms(qm, pm):
                return -2.0 * _plogp(qm) + _plogp(qm + pm)

            pi_v, d_v, s_v, sz_v = flow.pi[v], flow.dense[v], flow.rowsum[v], flow.size[v]
            int_vv = flow.rows[v].get(v, 0.0)
            # module "from" without v
            into_from = flows_to.get(m_from, 0.0)
            outof_from = flows_from.get(m_from, 0.0)
            q_from_new = max((s_mod[m_from] - s_v)
                             - (internal[m_from] - into_from - outof_from - int_vv)
                             + (d_mod[m_from] - d_v) * (n_ref - (size_mod[m_from] - sz_v)) / n_ref, 0.0)
            base_terms = mod_terms(q[m_from], sum_pi[m_from])
            best = None
            for m_to in sorted(candidates):
                q_to_new = max((s_mod[m_to] + s_v)
                               - (internal[m_to] + flows_to.get(m_to, 0.0)
                                  + flows_from.get(m_to, 0.0) + int_vv)
                               + (d_mod[m_to] + d_v) * (n_ref - (size_mod[m_to] + sz_v)) / n_ref, 0.0)
                q_tot_new = q_tot - q[m_from] - q[m_to] + q_from_new + q_to_new
                delta = (_plogp(q_tot_new) - _plogp(q_tot)
                         + mod_terms(q_from_new, sum_pi[m_from] - pi_v) - base_terms
                         + mod_terms(q_to_new, sum_pi[m_to] + pi_v) - mod_terms(q[m_to], sum_pi[m_to]))
                if best is None or delta < best[0] - 1e-15:
                    best = (delta, m_to, q_from_new, q_to_new, q_tot_new)
            if best is not None and best[0] < -1e-12:
                delta, m_to, q_from_new, q_to_new, q_tot_new = best
                internal[m_from] -= flows_to.get(m_from, 0.0) + flows_from.get(m_from, 0.0) + int_vv
                internal[m_to] += flows_to.get(m_to, 0.0) + flows_from.get(m_to, 0.0) + int_vv
                for arr, dv in ((sum_pi, pi_v), (d_mod, d_v), (s_mod, s_v), (size_mod, sz_v)):
                    arr[m_from] -= dv
                    arr[m_to] += dv
                q[m_from], q[m_to], q_tot = q_from_new, q_to_new, q_tot_new
                modules[v] = m_to
                moved = True
                improved_any = True
        if not moved:
            break
    return improved_any


def _aggregate_flow(flow: _FlowNet, modules) -> _FlowNet:
    k = int(modules.max()) + 1
    pi = np.zeros(k)
    np.add.at(pi, modules, flow.pi)
    dense = np.zeros(k)
    np.add.at(dense, modules, flow.dense)
    size = np.zeros(k, dtype=np.int64)
    np.add.at(size, modules, flow.size)
    rows = [dict() for _ in range(k)]
    for u, row in enumerate(flow.rows):
        mu = modules[u]
        for v, w in row.items():
            mv = modules[v]
            rows[mu][mv] = rows[mu].get(mv, 0.0) + w
    return _FlowNet(pi, dense, size, flow.n_ref, rows)


# --------------------------------------------------------------------------
# tabular encoding of a partition
# --------------------------------------------------------------------------

def community_features(p: CommunityPartition, g: Graph) -> NodeSignal:
    """Encode membership as (index code, community size, intra-degree fraction).

    The encoding is target-free: the raw community index, the size of the
    node's community, and the fraction of the node's undirected edges that
    stay inside its community (0 for isolated nodes).
    """
    und = g.undirected()
    assignment = p.assignment
    sizes = p.sizes()
    intra = np.zeros(und.n)
    deg = np.zeros(und.n)
    for u, v in zip(und.src.tolist(), und.dst.tolist()):
        deg[u] += 1
        if u != v:
            deg[v] += 1
        same = assignment[u] == assignment[v]
        if same:
            intra[u] += 1
            if u != v:
                intra[v] += 1
    frac = np.divide(intra, deg, out=np.zeros(und.n), where=deg > 0)
    cols = np.column_stack([assignment.astype(np.float64),
                            sizes[assignment].astype(np.float64), frac])
    name = p.algorithm or "community"
    return NodeSignal(name, "Community", ["code", "size", "intra"], cols)
