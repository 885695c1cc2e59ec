"""Planted-partition synthetic datasets in the Elliptic file convention.

The generator plants k communities (flagged ones sized to hit the target
positive rate), wires blocks with Bernoulli(p_in)/Bernoulli(p_out) edges,
labels flagged-community members illicit subject to one-sided noise, and
emits weakly label-informative base features. Ground truth is stored next
to the dataset for oracle checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class SyntheticSpec:
    n: int = 2000
    k: int = 8
    p_in: float = 0.05
    p_out: float = 0.001
    flagged_communities: int = 1
    positive_rate: float = 0.03
    label_noise: float = 0.1       # flagged member still labeled licit w.p. eps
    n_features: int = 10
    informative_columns: int = 3
    feature_shift: float = 1.2
    feature_noise: float = 1.0
    unlabeled_fraction: float = 0.2
    seed: int = 7

    def __post_init__(self):
        if not (0 <= self.p_in <= 1 and 0 <= self.p_out <= 1):
            raise ValueError("edge probabilities must lie in [0, 1]")
        if not 0 <= self.label_noise < 1:
            raise ValueError("label noise must lie in [0, 1)")
        if not 0 < self.positive_rate < 0.5:
            raise ValueError("positive rate must lie in (0, 0.5)")
        if self.flagged_communities >= self.k:
            raise ValueError("need at least one unflagged community")
        flagged_total = self._flagged_total()
        if flagged_total < 2 * self.flagged_communities:
            raise ValueError("positive rate too small for the node count")

    def _flagged_total(self) -> int:
        return int(round(self.n * self.positive_rate / (1 - self.label_noise)))

    def block_sizes(self) -> np.ndarray:
        flagged_total = self._flagged_total()
        sizes = np.zeros(self.k, dtype=np.int64)
        per_flag = flagged_total // self.flagged_communities
        sizes[:self.flagged_communities] = per_flag
        sizes[self.flagged_communities - 1] += flagged_total - per_flag * self.flagged_communities
        rest = self.n - flagged_total
        others = self.k - self.flagged_communities
        sizes[self.flagged_communities:] = rest // others
        sizes[-1] += rest - (rest // others) * others
        return sizes


def generate_synthetic(spec: SyntheticSpec, out_dir) -> dict:
    """Write edges/features/classes files plus ground truth; returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    sizes = spec.block_sizes()
    community = np.repeat(np.arange(spec.k), sizes)
    flagged = community < spec.flagged_communities

    # external ids: shuffled so dense order differs from community order
    order = rng.permutation(spec.n)
    ext_id = np.empty(spec.n, dtype=np.int64)
    ext_id[order] = 100000 + np.arange(spec.n)

    src, dst = [], []
    starts = np.concatenate([[0], np.cumsum(sizes)])
    for a in range(spec.k):
        ia = np.arange(starts[a], starts[a + 1])
        iu, iv = np.triu_indices(len(ia), k=1)
        mask = rng.random(len(iu)) < spec.p_in
        src.append(ia[iu[mask]])
        dst.append(ia[iv[mask]])
        for b in range(a + 1, spec.k):
            ib = np.arange(starts[b], starts[b + 1])
            m = rng.random((len(ia), len(ib))) < spec.p_out
            ii, jj = np.nonzero(m)
            src.append(ia[ii])
            dst.append(ib[jj])
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    flip = rng.random(len(src)) < 0.5
    src, dst = np.where(flip, dst, src), np.where(flip, src, dst)

    labels_clean = flagged.astype(np.int64)
    kept_positive = flagged & (rng.random(spec.n) >= spec.label_noise)
    labels = kept_positive.astype(np.int64)
    unlabeled = rng.random(spec.n) < spec.unlabeled_fraction

    # informative columns shift with the observed label: graph structure marks
    # flagged membership, features mark the label, so rejecting noise-flipped
    # members requires both views
    feats = rng.standard_normal((spec.n, spec.n_features)) * spec.feature_noise
    feats[:, :spec.informative_columns] += (
        labels[:, None] * spec.feature_shift)

    # emit files in external-id order
    row_order = np.argsort(ext_id)
    edges_path = out_dir / "edges.csv"
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write("txId1,txId2\n")
        for u, v in zip(src, dst):
            fh.write(f"{ext_id[u]},{ext_id[v]}\n")
    features_path = out_dir / "features.csv"
    with open(features_path, "w", encoding="utf-8") as fh:
        for i in row_order:
            fh.write(str(ext_id[i]) + ","
                     + ",".join(repr(float(x)) for x in feats[i]) + "\n")
    classes_path = out_dir / "classes.csv"
    with open(classes_path, "w", encoding="utf-8") as fh:
        fh.write("txId,class\n")
        for i in row_order:
            cls = "unknown" if unlabeled[i] else ("1" if labels[i] else "2")
            fh.write(f"{ext_id[i]},{cls}\n")
    truth_path = out_dir / "truth.json"
    truth = {
        "spec": {k: getattr(spec, k) for k in spec.__dataclass_fields__},
        "community": {str(ext_id[i]): int(community[i]) for i in range(spec.n)},
        "flagged_communities": list(range(spec.flagged_communities)),
        "clean_label": {str(ext_id[i]): int(labels_clean[i]) for i in range(spec.n)},
    }
    truth_path.write_text(json.dumps(truth, indent=1, sort_keys=True))
    return {"edges": str(edges_path), "features": str(features_path),
            "classes": str(classes_path), "truth": str(truth_path),
            "n_edges": int(len(src)),
            "positive_fraction": float(labels[~unlabeled].mean())}


def recovery_self_check(out_dir, seed: int = 0) -> float:
    """Adjusted agreement between Louvain communities and the planted truth."""
    from .graph import load_edge_list
    from .signals.community import louvain
    out_dir = Path(out_dir)
    truth = json.loads((out_dir / "truth.json").read_text())
    ids = sorted(truth["community"])
    g = load_edge_list(out_dir / "edges.csv", node_ids=ids)
    planted = np.array([truth["community"][x] for x in g.external_ids])
    found = louvain(g, seed=seed).assignment
    return adjusted_rand_index(planted, found)


def adjusted_rand_index(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    n = len(a)
    table = np.zeros((int(a.max()) + 1, int(b.max()) + 1))
    np.add.at(table, (a, b), 1)

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
