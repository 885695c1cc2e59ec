"""Embedding export in the shared harness format, plus a provenance sidecar."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .data import GraphData, Split
from .training import TrainedEncoder


def export_embeddings(trained: TrainedEncoder, data: GraphData,
                      out_path, split: Split | None = None) -> Path:
    """Write final-layer activations for every node (labeled and unlabeled).

    Rows follow the external-id universe of the dataset; a ``.meta.json``
    sidecar records architecture, spec digest, seed, split digest and the
    training defaults.
    """
    out_path = Path(out_path)
    mat = trained.embed(data)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"node_id,dim={mat.shape[1]}\n")
        for node_id, row in zip(data.ids, mat):
            fh.write(node_id + "," + ",".join(repr(float(v)) for v in row) + "\n")
    sidecar = {
        "architecture": trained.spec.architecture,
        "spec_digest": trained.spec.digest(),
        "training_seed": trained.seed,
        "split_digest": split.digest() if split is not None else None,
        "dim": int(mat.shape[1]),
        "rows": int(mat.shape[0]),
        "loss_first": trained.loss_history[0] if trained.loss_history else None,
        "loss_last": trained.loss_history[-1] if trained.loss_history else None,
        "defaults": trained.defaults,
    }
    with open(out_path.with_suffix(out_path.suffix + ".meta.json"), "w",
              encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=True)
    return out_path
