"""The 24-signal registry, grouped by taxonomic family.

Every signal is computed deterministically for a given graph: seeded
signals derive their stream from the protocol seed hashed with the signal
name, so evaluation seeds never change signal values. GNN-family signals
are ingested from externally produced embedding files and are simply
unavailable when no embedding directory is configured.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import PROTOCOL_SEED
from ..graph import Graph
from ..rng import hash_u64
from . import NodeSignal
from . import classic, community, embeddings


@dataclass
class SignalContext:
    protocol_seed: int = PROTOCOL_SEED
    embedding_dir: Path | None = None
    cache_dir: Path | None = None


def _derived_seed(name: str, ctx: SignalContext) -> int:
    stable = int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")
    return int(hash_u64(np.uint64(ctx.protocol_seed),
                        np.uint64(stable)) % (1 << 31))


def _community_signal(algorithm):
    def build(g: Graph, ctx: SignalContext) -> NodeSignal:
        fn = {"louvain": community.louvain, "leiden": community.leiden,
              "infomap": community.infomap}[algorithm]
        part = fn(g, seed=_derived_seed(algorithm, ctx))
        return community.community_features(part, g)
    return build


def _embedding_signal(name, category, builder):
    def build(g: Graph, ctx: SignalContext) -> NodeSignal:
        emb = builder(g, seed=_derived_seed(name, ctx))
        return emb.to_signal(name, category)
    return build


def _external_signal(name):
    def build(g: Graph, ctx: SignalContext) -> NodeSignal:
        if ctx.embedding_dir is None:
            raise FileNotFoundError(
                f"signal {name!r} needs an embedding directory with {name}.csv")
        path = Path(ctx.embedding_dir) / f"{name}.csv"
        if not path.exists():
            raise FileNotFoundError(f"external embedding file missing: {path}")
        emb = embeddings.load_embedding_file(path, g)
        return emb.to_signal(name, "GNN")
    return build


def _classic(fn, category):
    def build(g: Graph, ctx: SignalContext) -> NodeSignal:
        return fn(g)
    return build


REGISTRY: dict = {
    # Centrality
    "degree": ("Centrality", _classic(classic.degree_centrality, "Centrality")),
    "pagerank": ("Centrality", _classic(classic.pagerank, "Centrality")),
    "betweenness": ("Centrality", _classic(classic.betweenness_approx, "Centrality")),
    "eigenvector": ("Centrality", _classic(classic.eigenvector_centrality, "Centrality")),
    "closeness": ("Centrality", _classic(classic.closeness_centrality, "Centrality")),
    # Cohesion
    "clustering": ("Cohesion", _classic(classic.clustering_coefficient, "Cohesion")),
    "core_number": ("Cohesion", _classic(classic.core_number, "Cohesion")),
    "triangles": ("Cohesion", _classic(classic.triangle_count, "Cohesion")),
    "avg_neighbor_clustering": ("Cohesion", _classic(classic.average_neighbor_clustering, "Cohesion")),
    # Community
    "louvain": ("Community", _community_signal("louvain")),
    "leiden": ("Community", _community_signal("leiden")),
    "infomap": ("Community", _community_signal("infomap")),
    # Proximity
    "deepwalk": ("Proximity", _embedding_signal(
        "deepwalk", "Proximity", embeddings.deepwalk)),
    "node2vec_bfs": ("Proximity", _embedding_signal(
        "node2vec_bfs", "Proximity",
        lambda g, seed: embeddings.node2vec_variant(g, "bfs", seed=seed))),
    "node2vec_dfs": ("Proximity", _embedding_signal(
        "node2vec_dfs", "Proximity",
        lambda g, seed: embeddings.node2vec_variant(g, "dfs", seed=seed))),
    "node2vec_balanced": ("Proximity", _embedding_signal(
        "node2vec_balanced", "Proximity",
        lambda g, seed: embeddings.node2vec_variant(g, "balanced", seed=seed))),
    # Spectral
    "spectral": ("Spectral", _embedding_signal(
        "spectral", "Spectral",
        lambda g, seed: embeddings.spectral_embedding(g))),
    # Structural role
    "struct_layer": ("Structural", _embedding_signal(
        "struct_layer", "Structural", embeddings.struct_layer_embedding)),
    "graphwave": ("Structural", _embedding_signal(
        "graphwave", "Structural",
        lambda g, seed: embeddings.graphwave(g))),
    "role2vec": ("Structural", _embedding_signal(
        "role2vec", "Structural", embeddings.role2vec)),
    # GNN / neighborhood (external exports)
    "gcn": ("GNN", _external_signal("gcn")),
    "gat": ("GNN", _external_signal("gat")),
    "gcl": ("GNN", _external_signal("gcl")),
}

CATEGORY_MEMBERS: dict = {}
for _name, (_cat, _) in REGISTRY.items():
    CATEGORY_MEMBERS.setdefault(_cat, []).append(_name)

# signal families whose columns count as embeddings for PCA purposes
EMBEDDING_CATEGORIES = {"Proximity", "Spectral", "Structural", "GNN"}


def signal_category(name: str) -> str:
    return REGISTRY[name][0]


def compute_signal(name: str, g: Graph, ctx: SignalContext) -> NodeSignal:
    """Compute (or load from the rho-keyed cache) one registry signal."""
    if name not in REGISTRY:
        raise KeyError(f"unknown signal {name!r}")
    if ctx.cache_dir is not None:
        cache = Path(ctx.cache_dir) / f"{name}.npz"
        if cache.exists():
            blob = np.load(cache, allow_pickle=False)
            comps = [str(c) for c in blob["components"]]
            category = str(blob["category"])
            return NodeSignal(name, category, comps, blob["values"],
                              directedness=str(blob["directedness"]))
    category, builder = REGISTRY[name]
    sig = builder(g, ctx)
    if ctx.cache_dir is not None:
        Path(ctx.cache_dir).mkdir(parents=True, exist_ok=True)
        np.savez_compressed(
            Path(ctx.cache_dir) / f"{name}.npz", values=sig.values,
            components=np.array(sig.components, dtype="U32"),
            category=np.array(sig.category), directedness=np.array(sig.directedness))
    return sig
