"""Gaussian naive Bayes with variance smoothing."""

from __future__ import annotations

import numpy as np


class GNBModel:
    def __init__(self, theta, var, log_prior):
        self.family = "gnb"
        self.theta = theta          # (2, d) class means
        self.var = var              # (2, d) smoothed variances
        self.log_prior = log_prior  # (2,)

    def _joint_log_likelihood(self, X):
        jll = np.empty((len(X), 2))
        for c in range(2):
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var[c]))
            ll = ll - 0.5 * np.sum((X - self.theta[c]) ** 2 / self.var[c], axis=1)
            jll[:, c] = self.log_prior[c] + ll
        return jll

    def predict_proba(self, X):
        jll = self._joint_log_likelihood(X)
        jll -= jll.max(axis=1, keepdims=True)
        p = np.exp(jll)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self._joint_log_likelihood(X).argmax(axis=1)


def train_gnb(X, y, sample_weight, params: dict, seed: int) -> GNBModel:
    """Weighted per-class Gaussian fit; var_smoothing adds a fraction of the
    largest feature variance to every variance (sklearn semantics).

    The class_prior_ balancing strategy replaces empirical priors with
    uniform ones.
    """
    var_smoothing = float(params.get("var_smoothing", 1e-9))
    theta = np.zeros((2, X.shape[1]))
    var = np.zeros((2, X.shape[1]))
    prior = np.zeros(2)
    for c in range(2):
        mask = y == c
        w = sample_weight[mask]
        wsum = w.sum()
        theta[c] = (w[:, None] * X[mask]).sum(axis=0) / wsum
        var[c] = (w[:, None] * (X[mask] - theta[c]) ** 2).sum(axis=0) / wsum
        prior[c] = wsum
    prior /= prior.sum()
    eps = var_smoothing * X.var(axis=0).max()
    var += eps
    if params.get("balancing_strategy") == "class_prior_":
        prior = np.array([0.5, 0.5])
    return GNBModel(theta, var, np.log(np.clip(prior, 1e-12, None)))
