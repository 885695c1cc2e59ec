"""Classifier families behind a single train/predict contract.

Every family trains from numpy arrays that already went through the
leakage-safe preprocessing pipeline. Balancing (class weights normalized
to mean one, or seeded minority oversampling) is applied here so that all
families share identical semantics.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..assembly import oversample
from .bayes import train_gnb
from .linear import train_linear_svm, train_logreg
from .mlp import train_mlp
from .spaces import DEFAULT_SCALER, FAMILIES, SEARCH_SPACES, SearchSpace
from .trees import train_gbt, train_random_forest

_TRAINERS = {
    "logreg": train_logreg,
    "gnb": train_gnb,
    "linear_svm": train_linear_svm,
    "random_forest": train_random_forest,
    "gbt": train_gbt,
    "mlp": train_mlp,
}


@dataclass
class ModelSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in SEARCH_SPACES:
            raise ValueError(f"unknown classifier family {self.family!r}")
        SEARCH_SPACES[self.family].validate(self.params)

    @property
    def balancing(self) -> str:
        return self.params.get("balancing_strategy", "none")

    @property
    def scaler_mode(self) -> str:
        return self.params.get("scaler", DEFAULT_SCALER[self.family])

    @property
    def pca_setting(self):
        if self.family == "logreg" and self.params.get("use_emb_pca", False):
            return self.params.get("emb_pca_n", 64)
        return None

    def digest(self) -> str:
        payload = json.dumps({"family": self.family,
                              "params": _canonical(self.params)},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _canonical(obj):
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (tuple, list)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def class_weights(y: np.ndarray) -> np.ndarray:
    """Inverse-frequency sample weights normalized to mean exactly one."""
    n = len(y)
    w = np.ones(n)
    for c in np.unique(y):
        mask = y == c
        w[mask] = n / (len(np.unique(y)) * mask.sum())
    return w / w.mean()


def train(spec: ModelSpec, X_train: np.ndarray, y_train: np.ndarray, seed: int):
    """Fit one classifier; deterministic given (spec, data, seed)."""
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.int64)
    if not np.all(np.isfinite(X_train)):
        raise ValueError("non-finite training features")
    if len(np.unique(y_train)) < 2:
        raise ValueError("training set contains a single class")
    sample_weight = np.ones(len(y_train))
    if spec.balancing == "class_weights":
        sample_weight = class_weights(y_train)
    elif spec.balancing == "oversampling":
        ratio = float(spec.params.get("oversample_ratio", 1.0))
        X_train, y_train = oversample(X_train, y_train, ratio, seed)
        sample_weight = np.ones(len(y_train))
    model = _TRAINERS[spec.family](X_train, y_train, sample_weight,
                                   spec.params, seed)
    model.n_features_in = X_train.shape[1]
    model.spec = spec
    return model


def predict_proba(model, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.n_features_in:
        raise ValueError(f"column mismatch: model expects {model.n_features_in}, "
                         f"got {X.shape[1]}")
    proba = model.predict_proba(X)
    return proba


def predict(model, X: np.ndarray) -> np.ndarray:
    return predict_proba(model, X).argmax(axis=1)


__all__ = ["ModelSpec", "train", "predict", "predict_proba", "class_weights",
           "SEARCH_SPACES", "SearchSpace", "FAMILIES", "DEFAULT_SCALER"]
