"""Leakage-safe model pipeline: scaler + optional embedding PCA + classifier.

All fit-type steps see training rows only; transforms then apply to any
rows. Embedding-PCA applies to columns whose provenance is an
embedding-family signal and leaves the remaining columns untouched.
"""

from __future__ import annotations

import numpy as np

from .assembly import (FeatureTable, SplitSpec, apply_scaler, fit_scaler,
                       pca_reduce)
from .models import ModelSpec, predict, predict_proba, train
from .signals.registry import EMBEDDING_CATEGORIES, REGISTRY
from .stats import cross_entropy


def embedding_column_mask(table: FeatureTable) -> np.ndarray:
    """Columns produced by embedding-family signals (PCA candidates)."""
    mask = np.zeros(table.n_cols, dtype=bool)
    for j, prov in enumerate(table.provenance):
        if prov != "base" and prov in REGISTRY and \
                REGISTRY[prov][0] in EMBEDDING_CATEGORIES:
            mask[j] = True
    return mask


class FittedPipeline:
    def __init__(self, scaler, pca, emb_mask, model):
        self.scaler = scaler
        self.pca = pca
        self.emb_mask = emb_mask
        self.model = model

    def transform(self, X: np.ndarray) -> np.ndarray:
        Z = apply_scaler(self.scaler, X)
        if self.pca is None:
            return Z
        reduced = self.pca.apply(Z[:, self.emb_mask])
        return np.hstack([Z[:, ~self.emb_mask], reduced])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return predict(self.model, self.transform(X))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return predict_proba(self.model, self.transform(X))


def fit_pipeline(table: FeatureTable, labels: np.ndarray, spec: ModelSpec,
                 train_idx: np.ndarray, seed: int) -> FittedPipeline:
    X_train_raw = table.values[train_idx]
    scaler = fit_scaler(X_train_raw, spec.scaler_mode)
    X_train = apply_scaler(scaler, X_train_raw)
    pca = None
    emb_mask = embedding_column_mask(table)
    if spec.pca_setting is not None and emb_mask.any():
        n = spec.pca_setting
        pca = pca_reduce(X_train[:, emb_mask], n)
        X_train = np.hstack([X_train[:, ~emb_mask], pca.apply(X_train[:, emb_mask])])
    model = train(spec, X_train, labels[train_idx], seed)
    return FittedPipeline(scaler, pca, emb_mask, model)


def hpo_objective(table: FeatureTable, labels: np.ndarray, family: str,
                  split: SplitSpec, seed: int):
    """Validation cross-entropy closure over a hyperparameter dict."""
    def objective(params: dict) -> float:
        spec = ModelSpec(family, params)
        pipe = fit_pipeline(table, labels, spec, split.train, seed)
        proba = pipe.predict_proba(table.values[split.val])
        return cross_entropy(proba, labels[split.val])
    return objective
