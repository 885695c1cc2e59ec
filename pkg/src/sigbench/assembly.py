"""Augmented tabular dataset assembly.

Base features and node labels are loaded from Elliptic-convention files,
graph signals are concatenated column-wise with provenance tags, and the
stratified 60/20/20 splits over labeled nodes are derived per seed. All
fit-type preprocessing (scaler, PCA) is restricted to training rows.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ILLICIT, LICIT, UNLABELED = 1, 0, -1
_CLASS_MAP = {"1": ILLICIT, "2": LICIT, "unknown": UNLABELED}


class TableFormatError(ValueError):
    pass


@dataclass
class FeatureTable:
    """Node-aligned columnar matrix with per-column provenance."""

    ids: list
    values: np.ndarray                 # (n, d) float64
    names: list
    provenance: list                   # "base" or the producing signal name

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.names) != self.values.shape[1] or len(self.provenance) != len(self.names):
            raise ValueError("column metadata out of sync with matrix")
        if len(set(self.names)) != len(self.names):
            dupes = sorted({n for n in self.names if self.names.count(n) > 1})
            raise ValueError(f"duplicate column names: {dupes}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite feature values")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def columns_from(self, provenance_kind: str) -> np.ndarray:
        """Boolean mask of columns whose provenance matches a kind.

        ``provenance_kind`` is "base" for base features or "signal" for
        every non-base column.
        """
        if provenance_kind == "base":
            return np.array([p == "base" for p in self.provenance])
        return np.array([p != "base" for p in self.provenance])


@dataclass
class LabelVector:
    labels: np.ndarray   # per node: 1 illicit, 0 licit, -1 unlabeled

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        present = set(np.unique(self.labels[self.labels >= 0]).tolist())
        if len(present) < 2:
            raise ValueError("need at least 2 labeled classes")

    @property
    def labeled_idx(self) -> np.ndarray:
        return np.flatnonzero(self.labels >= 0)


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def digest(self) -> str:
        h = hashlib.sha256()
        for part in (self.train, self.val, self.test):
            h.update(np.sort(part).astype(np.int64).tobytes())
            h.update(b"|")
        return h.hexdigest()[:16]


def load_node_table(features_path, classes_path, base_column_range=None
                    ) -> tuple[FeatureTable, LabelVector]:
    """Load Elliptic-convention feature and class files.

    The features file is headerless (id followed by feature columns); the
    class file has an id,class header with class in {"1","2","unknown"}.
    ``base_column_range`` restricts to the local-feature block as a
    (start, stop) pair over feature columns (id excluded).
    """
    features_path, classes_path = Path(features_path), Path(classes_path)
    ids: list = []
    rows: list = []
    with open(features_path, "r", encoding="utf-8") as fh:
        width = None
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise TableFormatError(
                    f"{features_path}:{lineno}: ragged row ({len(parts)} vs {width} fields)")
            ids.append(parts[0])
            try:
                rows.append([float(x) for x in parts[1:]])
            except ValueError as exc:
                raise TableFormatError(
                    f"{features_path}:{lineno}: non-numeric feature ({exc})") from None
    values = np.array(rows, dtype=np.float64)
    if base_column_range is not None:
        lo, hi = base_column_range
        if hi > values.shape[1]:
            raise TableFormatError(
                f"base_column_range {base_column_range} exceeds the "
                f"{values.shape[1]} feature columns present")
        values = values[:, lo:hi]
    names = [f"base_{j:03d}" for j in range(values.shape[1])]
    table = FeatureTable(ids, values, names, ["base"] * values.shape[1])

    labels = np.full(len(ids), UNLABELED, dtype=np.int64)
    index = {x: i for i, x in enumerate(ids)}
    with open(classes_path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, parts in enumerate(reader, start=1):
            if not parts:
                continue
            if lineno == 1 and parts[-1].strip().lower() in ("class", "label"):
                continue
            node_id, cls = parts[0].strip(), parts[-1].strip()
            if node_id not in index:
                raise TableFormatError(
                    f"{classes_path}:{lineno}: id {node_id!r} has no feature row")
            if cls not in _CLASS_MAP:
                raise TableFormatError(
                    f"{classes_path}:{lineno}: unknown class {cls!r}")
            labels[index[node_id]] = _CLASS_MAP[cls]
    return table, LabelVector(labels)


def concat_signals(base: FeatureTable, signals) -> FeatureTable:
    """Append signal columns to the base table, base first then list order."""
    values = [base.values]
    names = list(base.names)
    prov = list(base.provenance)
    for sig in signals:
        if sig.node_count != base.n_rows:
            raise ValueError(f"{sig.name}: {sig.node_count} rows vs table {base.n_rows}")
        values.append(sig.values)
        names.extend(sig.column_names)
        prov.extend([sig.name] * len(sig.column_names))
    return FeatureTable(base.ids, np.hstack(values), names, prov)


def stratified_split(labels: LabelVector, seed: int,
                     fractions=(0.6, 0.2, 0.2)) -> SplitSpec:
    """Per-class 60/20/20 split over labeled nodes, remainder train-first."""
    rng = np.random.default_rng(seed)
    train, val, test = [], [], []
    for cls in (ILLICIT, LICIT):
        members = np.flatnonzero(labels.labels == cls)
        if len(members) < 5:
            raise ValueError(f"class {cls} has only {len(members)} labeled nodes")
        members = members[rng.permutation(len(members))]
        n = len(members)
        n_tr, n_va = int(n * fractions[0]), int(n * fractions[1])
        n_te = int(n * fractions[2])
        rest = n - n_tr - n_va - n_te
        # leftover items go train, then val, then test
        adds = [0, 0, 0]
        for r in range(rest):
            adds[r % 3] += 1
        n_tr += adds[0]
        n_va += adds[1]
        n_te += adds[2]
        train.append(members[:n_tr])
        val.append(members[n_tr:n_tr + n_va])
        test.append(members[n_tr + n_va:])
    return SplitSpec(seed=seed,
                     train=np.sort(np.concatenate(train)),
                     val=np.sort(np.concatenate(val)),
                     test=np.sort(np.concatenate(test)))


def save_split(spec: SplitSpec, ids, path) -> None:
    """Persist a split as external_id,role rows (the SplitSpec cache format)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("external_id,role\n")
        for name, part in (("train", spec.train), ("val", spec.val),
                           ("test", spec.test)):
            for i in part:
                fh.write(f"{ids[i]},{name}\n")


def load_split(path, ids, seed: int) -> SplitSpec:
    index = {x: i for i, x in enumerate(ids)}
    parts = {"train": [], "val": [], "test": []}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("external_id"):
            raise TableFormatError(f"{path}: bad split header")
        for line in fh:
            node_id, role = line.strip().split(",")
            parts[role].append(index[node_id])
    return SplitSpec(seed=seed, **{k: np.array(sorted(v), dtype=np.int64)
                                   for k, v in parts.items()})


# --------------------------------------------------------------------------
# leakage-safe preprocessing
# --------------------------------------------------------------------------

@dataclass
class Scaler:
    mode: str
    center: np.ndarray
    scale: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.center) / self.scale


def fit_scaler(X_train: np.ndarray, mode: str = "standard") -> Scaler:
    """Fit column statistics on training rows only.

    ``standard`` centers to mean 0 / variance 1; ``minmax`` maps the train
    range onto [0, 1]. Zero-variance columns map to 0 in either mode;
    ``none`` is the identity.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    d = X_train.shape[1]
    if mode == "none":
        return Scaler("none", np.zeros(d), np.ones(d))
    if mode == "standard":
        center = X_train.mean(axis=0)
        scale = X_train.std(axis=0)
    elif mode == "minmax":
        center = X_train.min(axis=0)
        scale = X_train.max(axis=0) - center
    else:
        raise ValueError(f"unknown scaler mode {mode!r}")
    scale = np.where(scale == 0, 1.0, scale)
    return Scaler(mode, center, scale)


def apply_scaler(scaler: Scaler, X: np.ndarray) -> np.ndarray:
    return scaler.apply(np.asarray(X, dtype=np.float64))


@dataclass
class PCAReducer:
    mean: np.ndarray
    components: np.ndarray   # (k, d)

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) @ self.components.T


def pca_reduce(X_train: np.ndarray, n) -> PCAReducer:
    """Fit PCA on train rows; n is a component count or a variance fraction.

    An integer above the column count clamps with a warning-style meta; the
    0.95 setting keeps the smallest k capturing at least that fraction of
    train variance. Loadings are sign-fixed (first nonzero entry positive).
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    mean = X_train.mean(axis=0)
    Xc = X_train - mean
    U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    var = s ** 2
    if isinstance(n, float) and 0 < n < 1:
        frac = np.cumsum(var) / var.sum() if var.sum() > 0 else np.ones_like(var)
        k = int(np.searchsorted(frac, n) + 1)
    else:
        k = min(int(n), Vt.shape[0])
    comps = Vt[:k].copy()
    for j in range(k):
        nz = np.flatnonzero(np.abs(comps[j]) > 1e-12)
        if len(nz) and comps[j, nz[0]] < 0:
            comps[j] = -comps[j]
    return PCAReducer(mean=mean, components=comps)


def oversample(X_train: np.ndarray, y_train: np.ndarray, ratio: float,
               seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Duplicate minority rows until minority == round(ratio * majority).

    Sampling is with replacement and seeded; the original rows are always
    retained. Already-balanced-enough inputs pass through unchanged.
    """
    if not 0 < ratio <= 1:
        raise ValueError("ratio must be in (0, 1]")
    y_train = np.asarray(y_train)
    classes, counts = np.unique(y_train, return_counts=True)
    if len(classes) != 2:
        raise ValueError("oversample expects binary labels")
    minority = classes[np.argmin(counts)]
    n_min, n_maj = counts.min(), counts.max()
    target = int(round(ratio * n_maj))
    if target <= n_min:
        return X_train, y_train
    rng = np.random.default_rng(seed)
    pool = np.flatnonzero(y_train == minority)
    extra = rng.choice(pool, size=target - n_min, replace=True)
    idx = np.concatenate([np.arange(len(y_train)), extra])
    return X_train[idx], y_train[idx]
