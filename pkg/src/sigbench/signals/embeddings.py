"""Embedding-family signals: proximity, spectral, structural role, ingestion.

All generators emit a dense |V| x d matrix aligned to dense node indices.
Fixed generation parameters (10 walks of length 20, window 10, dimension
64, 6 diffusion scales in [1e-2, 1e1]) are module constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..graph import Graph
from . import NodeSignal
from .walks import WalkConfig, WalkCorpus, generate_walks
from .skipgram import skipgram_train

EMBED_DIM = 64
WALKS_PER_NODE = 10
WALK_LENGTH = 20
WINDOW = 10

NODE2VEC_PQ = {"bfs": (1.0, 4.0), "dfs": (1.0, 0.25), "balanced": (1.0, 1.0)}


@dataclass
class Embedding:
    """Dense node embedding matrix with provenance."""

    matrix: np.ndarray
    generator: str
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("embedding matrix must be 2-D")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError(f"{self.generator}: non-finite embedding values")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def to_signal(self, name: str, category: str) -> NodeSignal:
        comps = [f"e{i:02d}" for i in range(self.dim)]
        return NodeSignal(name, category, comps, self.matrix,
                          meta=dict(self.meta, generator=self.generator,
                                    seed=self.seed))


def deepwalk(g: Graph, seed: int = 0, dim: int = EMBED_DIM) -> Embedding:
    """Unbiased truncated random walks + skip-gram."""
    cfg = WalkConfig(WALKS_PER_NODE, WALK_LENGTH, p=1.0, q=1.0, seed=seed)
    corpus = generate_walks(g, cfg)
    mat, meta = skipgram_train(corpus, g.n, dim=dim, window=WINDOW, seed=seed)
    return Embedding(mat, "deepwalk", seed, meta)


def node2vec_variant(g: Graph, variant: str, seed: int = 0,
                     dim: int = EMBED_DIM) -> Embedding:
    """node2vec with (p, q) chosen per exploration style.

    bfs -> (1, 4) keeps walks local, dfs -> (1, 0.25) pushes outward,
    balanced -> (1, 1) reduces to the DeepWalk distribution.
    """
    if variant not in NODE2VEC_PQ:
        raise ValueError(f"unknown node2vec variant {variant!r}")
    p, q = NODE2VEC_PQ[variant]
    cfg = WalkConfig(WALKS_PER_NODE, WALK_LENGTH, p=p, q=q, seed=seed)
    corpus = generate_walks(g, cfg)
    mat, meta = skipgram_train(corpus, g.n, dim=dim, window=WINDOW, seed=seed)
    meta.update(p=p, q=q)
    return Embedding(mat, f"node2vec_{variant}", seed, meta)


# --------------------------------------------------------------------------
# spectral embedding (Laplacian eigenmaps)
# --------------------------------------------------------------------------

_DENSE_EIG_LIMIT = 2048


def _component_laplacian(und: Graph, nodes: np.ndarray):
    adj = und.adj
    local = {int(v): i for i, v in enumerate(nodes)}
    rows, cols = [], []
    for v in nodes:
        for u in adj.neighbors(int(v)):
            if u != v:
                rows.append(local[int(v)])
                cols.append(local[int(u)])
    m = len(nodes)
    A = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))
    deg = np.asarray(A.sum(axis=1)).ravel()
    L = sp.diags(deg) - A
    return L, A, deg


def _fix_signs(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > tol)
        if len(nz) and col[nz[0]] < 0:
            vecs[:, j] = -col
    return vecs


def spectral_embedding(g: Graph, dim: int = EMBED_DIM) -> Embedding:
    """Entries of the dim smallest non-trivial combinatorial-Laplacian eigenvectors.

    Computed independently per connected component, eigenvalue-ascending,
    sign-fixed so the first nonzero entry of each eigenvector is positive;
    components smaller than dim + 1 are zero-padded.
    """
    und = g.undirected()
    comp = und.components()
    out = np.zeros((und.n, dim))
    eigenvalues = {}
    for c in range(comp.count):
        nodes = np.flatnonzero(comp.labels == c)
        m = len(nodes)
        if m == 1:
            continue
        k = min(dim, m - 1)
        L, _, _ = _component_laplacian(und, nodes)
        if m <= _DENSE_EIG_LIMIT:
            vals, vecs = np.linalg.eigh(L.toarray())
        else:
            vals, vecs = spla.eigsh(L.tocsc().astype(np.float64), k=k + 1,
                                    sigma=-1e-3, which="LM")
            order = np.argsort(vals)
            vals, vecs = vals[order], vecs[:, order]
        take = vecs[:, 1:k + 1].copy()
        out[nodes, :k] = _fix_signs(take)
        eigenvalues[c] = vals[:k + 1]
    return Embedding(out, "spectral", meta={"n_components": comp.count,
                                            "eigenvalues": {k: v.tolist() for k, v in eigenvalues.items()}})


# --------------------------------------------------------------------------
# GraphWave: heat-wavelet characteristic functions + random projection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveletConfig:
    n_scales: int = 6
    tau_min: float = 1e-2
    tau_max: float = 1e1
    eigen_cutoff: int = 1000       # component size at which Lanczos takes over
    retained_eigenpairs: int = 32
    sample_points: int = 16        # t grid per scale, over [0, 2]
    target_dim: int = EMBED_DIM
    projection_seed: int = 42

    def scales(self) -> np.ndarray:
        return np.logspace(np.log10(self.tau_min), np.log10(self.tau_max),
                           self.n_scales)

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, 2.0, self.sample_points)


def heat_characteristic(coeffs: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    """Empirical characteristic function Re/Im of wavelet coefficient columns.

    ``coeffs`` is (m, nodes); returns (nodes, 2 * len(t_grid)).
    """
    phase = t_grid[:, None, None] * coeffs[None, :, :]
    efn = np.exp(1j * phase).mean(axis=1)          # (t, nodes)
    return np.concatenate([efn.real.T, efn.imag.T], axis=1)


def graphwave(g: Graph, cfg: WaveletConfig = WaveletConfig()) -> Embedding:
    """Spectral heat-wavelet signatures projected to the target dimension.

    Per component the Laplacian is decomposed exactly (dense) below the
    eigen cutoff and with truncated Lanczos (retained_eigenpairs) above it;
    each node's wavelet coefficient distribution is summarized by its
    characteristic function on the t grid per diffusion scale, and the
    concatenated raw signature is Gaussian-random-projected with a fixed,
    node-independent seed.
    """
    und = g.undirected()
    comp = und.components()
    scales = cfg.scales()
    t_grid = cfg.t_grid()
    raw_dim = cfg.n_scales * 2 * cfg.sample_points
    raw = np.zeros((und.n, raw_dim))
    for c in range(comp.count):
        nodes = np.flatnonzero(comp.labels == c)
        m = len(nodes)
        if m == 1:
            # lone node: coefficient distribution is the point mass at 1
            block = np.concatenate(
                [np.concatenate([np.cos(t_grid), np.sin(t_grid)])
                 for _ in scales])
            raw[nodes[0]] = block
            continue
        L, _, _ = _component_laplacian(und, nodes)
        if m < cfg.eigen_cutoff:
            vals, vecs = np.linalg.eigh(L.toarray())
        else:
            k = min(cfg.retained_eigenpairs, m - 1)
            vals, vecs = spla.eigsh(L.tocsc().astype(np.float64), k=k,
                                    sigma=-1e-3, which="LM")
            order = np.argsort(vals)
            vals, vecs = vals[order], vecs[:, order]
        for si, tau in enumerate(scales):
            filt = np.exp(-tau * np.maximum(vals, 0.0))
            lo_col = si * 2 * cfg.sample_points
            for start in range(0, m, 512):  # bound the (m, chunk) wavelet block
                sel = slice(start, min(start + 512, m))
                coeffs = (vecs * filt) @ vecs[sel].T
                block = heat_characteristic(coeffs, t_grid)
                raw[nodes[sel], lo_col:lo_col + 2 * cfg.sample_points] = block
    proj_rng = np.random.default_rng(cfg.projection_seed)
    R = proj_rng.standard_normal((raw_dim, cfg.target_dim)) / np.sqrt(cfg.target_dim)
    return Embedding(raw @ R, "graphwave",
                     meta={"scales": scales.tolist(), "raw_dim": raw_dim})


# --------------------------------------------------------------------------
# role2vec: degree/triangle role tokens + skip-gram over attributed walks
# --------------------------------------------------------------------------

def role_tokens(g: Graph) -> np.ndarray:
    """Role id per node from log-binned (degree, triangle count)."""
    from .classic import _per_node_triangles, _simple_neighbors
    und = g.undirected()
    deg = np.array([len(nb) for nb in _simple_neighbors(und)])
    tri = _per_node_triangles(und)
    key = (np.floor(np.log2(1 + deg)).astype(np.int64),
           np.floor(np.log2(1 + tri)).astype(np.int64))
    pairs = key[0] * (key[1].max() + 2) + key[1]
    _, tokens = np.unique(pairs, return_inverse=True)
    return tokens


def role2vec(g: Graph, seed: int = 0, dim: int = EMBED_DIM) -> Embedding:
    """Skip-gram over walks whose node ids are replaced by role tokens."""
    und = g.undirected()
    tokens = role_tokens(und)
    cfg = WalkConfig(WALKS_PER_NODE, WALK_LENGTH, p=1.0, q=1.0, seed=seed)
    corpus = generate_walks(und, cfg)
    token_walks = np.where(corpus.walks >= 0, tokens[corpus.walks], -1)
    token_corpus = WalkCorpus(walks=token_walks, lengths=corpus.lengths)
    vocab = int(tokens.max()) + 1
    mat, meta = skipgram_train(token_corpus, vocab, dim=dim, window=WINDOW,
                               seed=seed)
    meta["n_roles"] = vocab
    return Embedding(mat[tokens], "role2vec", seed, meta)


# --------------------------------------------------------------------------
# layer-weighted structural distance embedding (simplified ffstruc2vec)
# --------------------------------------------------------------------------

STRUCT_LAYERS = 2          # rings 0..2 carry weight 1.0, deeper rings 0
STRUCT_KNN = 10


def ring_degree_stats(g: Graph, max_layer: int = STRUCT_LAYERS) -> np.ndarray:
    """Per node: (mean, variance) of degrees in each ring 0..max_layer.

    Ring 0 is the node itself; empty rings contribute (0, 0).
    """
    und = g.undirected()
    adj = und.adj
    n = und.n
    deg = adj.degrees().astype(np.float64)
    stats = np.zeros((n, 2 * (max_layer + 1)))
    for v in range(n):
        dist = _bounded_bfs(adj, v, max_layer, n)
        for k in range(max_layer + 1):
            ring = np.flatnonzero(dist == k)
            if len(ring):
                d = deg[ring]
                stats[v, 2 * k] = d.mean()
                stats[v, 2 * k + 1] = d.var()
    return stats


def _bounded_bfs(adj, source: int, max_depth: int, n: int) -> np.ndarray:
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source])
    for d in range(1, max_depth + 1):
        nxt = []
        for v in frontier:
            for u in adj.neighbors(int(v)):
                if dist[u] == -1:
                    dist[u] = d
                    nxt.append(u)
        if not nxt:
            break
        frontier = np.array(nxt)
    return dist


def structural_distance(stats_u: np.ndarray, stats_v: np.ndarray,
                        layer_weights=None) -> float:
    """Sum over layers of |mean diff| + |variance diff|, layer-weighted."""
    diff = np.abs(stats_u - stats_v)
    if layer_weights is None:
        return float(diff.sum())
    w = np.repeat(layer_weights, 2)
    return float((diff * w).sum())


def struct_layer_embedding(g: Graph, seed: int = 0, dim: int = EMBED_DIM,
                           knn: int = STRUCT_KNN) -> Embedding:
    """Walk + skip-gram over a k-NN graph of layer-weighted structural distances.

    Distances are L1 over per-ring degree (mean, variance) pairs for rings
    0..2 (unit layer weights); each node links to its knn structurally
    closest peers and the resulting similarity graph feeds the standard
    walk + skip-gram pipeline.
    """
    from scipy.spatial import cKDTree
    und = g.undirected()
    n = und.n
    stats = ring_degree_stats(und)
    k = min(knn + 1, n)
    tree = cKDTree(stats)
    _, nbrs = tree.query(stats, k=k, p=1)
    nbrs = np.atleast_2d(nbrs)
    src, dst = [], []
    for v in range(n):
        for u in nbrs[v]:
            if u != v:
                src.append(v)
                dst.append(int(u))
    sim_graph = Graph([str(i) for i in range(n)],
                      np.array(src, dtype=np.int64),
                      np.array(dst, dtype=np.int64), directed=True)
    cfg = WalkConfig(WALKS_PER_NODE, WALK_LENGTH, p=1.0, q=1.0, seed=seed)
    corpus = generate_walks(sim_graph, cfg)
    mat, meta = skipgram_train(corpus, n, dim=dim, window=WINDOW, seed=seed)
    meta.update(knn=knn, layers=STRUCT_LAYERS)
    return Embedding(mat, "struct_layer", seed, meta)


# --------------------------------------------------------------------------
# external embedding ingestion (GNN exports)
# --------------------------------------------------------------------------

class EmbeddingFormatError(ValueError):
    pass


def load_embedding_file(path, g: Graph) -> Embedding:
    """Read the shared embedding format and align rows to dense indices.

    Header is ``node_id,dim=<d>``; each row carries an external id followed
    by d finite reals. Every graph node must appear exactly once.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("node_id,dim="):
            raise EmbeddingFormatError(f"{path}: bad header {header!r}")
        dim = int(header.split("=", 1)[1])
        mat = np.zeros((g.n, dim))
        seen = np.zeros(g.n, dtype=bool)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim + 1} fields, got {len(parts)}")
            node_id = parts[0]
            if node_id not in g.id_to_index:
                raise EmbeddingFormatError(f"{path}:{lineno}: unknown node id {node_id!r}")
            idx = g.id_to_index[node_id]
            if seen[idx]:
                raise EmbeddingFormatError(f"{path}:{lineno}: duplicate node id {node_id!r}")
            row = np.array([float(x) for x in parts[1:]])
            if not np.all(np.isfinite(row)):
                raise EmbeddingFormatError(f"{path}:{lineno}: non-finite value")
            mat[idx] = row
            seen[idx] = True
    if not seen.all():
        missing = [g.external_ids[i] for i in np.flatnonzero(~seen)[:10]]
        raise EmbeddingFormatError(
            f"{path}: {int((~seen).sum())} graph nodes missing from embedding "
            f"file; first absent ids: {missing}")
    return Embedding(mat, f"external:{path.name}")


def write_embedding_file(path, ids, matrix: np.ndarray) -> None:
    """Write the shared embedding file format (full float precision)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"node_id,dim={matrix.shape[1]}\n")
        for node_id, row in zip(ids, matrix):
            fh.write(node_id + "," + ",".join(repr(float(x)) for x in row) + "\n")
