"""Dataset and split-cache loading over the shared file conventions.

Only file interfaces are consumed here: the headerless features file
(id + columns), the id,class file ("1" illicit / "2" licit / "unknown"),
the two-column edge list, and the harness split cache
(``external_id,role`` rows). Dense indexing follows the features file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class GraphData:
    ids: list
    features: np.ndarray        # (n, d)
    labels: np.ndarray          # 1 illicit / 0 licit / -1 unlabeled
    edge_src: np.ndarray
    edge_dst: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)


@dataclass
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def digest(self) -> str:
        h = hashlib.sha256()
        for part in (self.train, self.val, self.test):
            h.update(np.sort(part).astype(np.int64).tobytes())
            h.update(b"|")
        return h.hexdigest()[:16]


def load_dataset(features_path, classes_path, edges_path) -> GraphData:
    ids, rows = [], []
    with open(features_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            ids.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    features = np.asarray(rows, dtype=np.float32)
    index = {x: i for i, x in enumerate(ids)}

    labels = np.full(len(ids), -1, dtype=np.int64)
    class_map = {"1": 1, "2": 0, "unknown": -1}
    with open(classes_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            node_id, cls = (p.strip() for p in line.split(","))
            if lineno == 1 and cls.lower() in ("class", "label"):
                continue
            labels[index[node_id]] = class_map[cls]

    src, dst = [], []
    with open(edges_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            a, b = (p.strip() for p in line.split(","))
            if lineno == 1 and (a not in index or b not in index):
                continue  # header row
            src.append(index[a])
            dst.append(index[b])
    return GraphData(ids, features, labels,
                     np.asarray(src, dtype=np.int64),
                     np.asarray(dst, dtype=np.int64))


def load_split(path, ids) -> Split:
    index = {x: i for i, x in enumerate(ids)}
    parts = {"train": [], "val": [], "test": []}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("external_id"):
            raise ValueError(f"{path}: not a split cache file")
        for line in fh:
            node_id, role = line.strip().split(",")
            parts[role].append(index[node_id])
    return Split(**{k: np.asarray(sorted(v), dtype=np.int64)
                    for k, v in parts.items()})
