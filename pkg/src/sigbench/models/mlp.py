"""Dense feed-forward classifier trained with Adam.

Architecture choices come from the search space (hidden layer tuple,
relu/tanh, batch size, L2 alpha, initial learning rate). Training runs at
most 200 epochs with early stopping (patience 10) on an internal 10%
stratified holdout carved from the training rows, so validation and test
rows are never touched during fitting.
"""

from __future__ import annotations

import numpy as np

MAX_EPOCHS = 200
PATIENCE = 10
HOLDOUT_FRACTION = 0.1


def _act(name):
    if name == "relu":
        return lambda z: np.maximum(z, 0.0), lambda z, a: (z > 0).astype(float)
    if name == "tanh":
        return np.tanh, lambda z, a: 1.0 - a ** 2
    raise ValueError(f"unknown activation {name!r}")


class MLPModel:
    def __init__(self, weights, biases, activation):
        self.family = "mlp"
        self.weights = weights
        self.biases = biases
        self.activation = activation

    def _forward(self, X):
        f, _ = _act(self.activation)
        a = X
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            a = f(a @ W + b)
        z = a @ self.weights[-1] + self.biases[-1]
        return z.ravel()

    def predict_proba(self, X):
        p = 1.0 / (1.0 + np.exp(-np.clip(self._forward(X), -35, 35)))
        return np.column_stack([1 - p, p])

    def predict(self, X):
        return (self._forward(X) > 0).astype(np.int64)


def init_network(layer_sizes, rng):
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def forward_backward(weights, biases, activation, X, y, sample_weight, alpha):
    """Loss and gradients of weighted binary cross-entropy + L2 alpha penalty."""
    f, df = _act(activation)
    acts = [X]
    zs = []
    a = X
    for W, b in zip(weights[:-1], biases[:-1]):
        z = a @ W + b
        zs.append(z)
        a = f(z)
        acts.append(a)
    logits = (a @ weights[-1] + biases[-1]).ravel()
    p = 1.0 / (1.0 + np.exp(-np.clip(logits, -35, 35)))
    wsum = sample_weight.sum()
    eps = 1e-12
    loss = -np.sum(sample_weight * (y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))) / wsum
    loss += 0.5 * alpha * sum(float(np.sum(W * W)) for W in weights)
    delta = (sample_weight * (p - y) / wsum)[:, None]
    grads_W = [None] * len(weights)
    grads_b = [None] * len(biases)
    grads_W[-1] = acts[-1].T @ delta + alpha * weights[-1]
    grads_b[-1] = delta.sum(axis=0)
    back = delta @ weights[-1].T
    for layer in range(len(weights) - 2, -1, -1):
        back = back * df(zs[layer], acts[layer + 1])
        grads_W[layer] = acts[layer].T @ back + alpha * weights[layer]
        grads_b[layer] = back.sum(axis=0)
        if layer:
            back = back @ weights[layer].T
    return loss, grads_W, grads_b


def train_mlp(X, y, sample_weight, params: dict, seed: int) -> MLPModel:
    hidden = params.get("hidden_layer_sizes", (64,))
    if isinstance(hidden, (int, np.integer)):
        hidden = (int(hidden),)
    activation = params.get("activation", "relu")
    alpha = float(params.get("alpha", 1e-4))
    lr = float(params.get("lr_init", 1e-3))
    batch_size = int(params.get("batch_size", 128))
    rng = np.random.default_rng(seed)

    # internal stratified holdout for early stopping
    holdout = np.zeros(len(y), dtype=bool)
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(len(members))]
        k = max(1, int(round(HOLDOUT_FRACTION * len(members))))
        holdout[members[:k]] = True
    X_tr, y_tr, w_tr = X[~holdout], y[~holdout], sample_weight[~holdout]
    X_ho, y_ho, w_ho = X[holdout], y[holdout], sample_weight[holdout]

    sizes = [X.shape[1], *hidden, 1]
    weights, biases = init_network(sizes, rng)
    m_w = [np.zeros_like(W) for W in weights]
    v_w = [np.zeros_like(W) for W in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    best_loss = np.inf
    best_state = None
    strikes = 0
    n = len(y_tr)
    for _ in range(MAX_EPOCHS):
        order = rng.permutation(n)
        for lo in range(0, n, batch_size):
            sel = order[lo:lo + batch_size]
            _, gW, gb = forward_backward(weights, biases, activation,
                                         X_tr[sel], y_tr[sel], w_tr[sel], alpha)
            step += 1
            corr1 = 1 - beta1 ** step
            corr2 = 1 - beta2 ** step
            for i in range(len(weights)):
                m_w[i] = beta1 * m_w[i] + (1 - beta1) * gW[i]
                v_w[i] = beta2 * v_w[i] + (1 - beta2) * gW[i] ** 2
                weights[i] -= lr * (m_w[i] / corr1) / (np.sqrt(v_w[i] / corr2) + eps)
                m_b[i] = beta1 * m_b[i] + (1 - beta1) * gb[i]
                v_b[i] = beta2 * v_b[i] + (1 - beta2) * gb[i] ** 2
                biases[i] -= lr * (m_b[i] / corr1) / (np.sqrt(v_b[i] / corr2) + eps)
        ho_loss, _, _ = forward_backward(weights, biases, activation,
                                         X_ho, y_ho, w_ho, 0.0)
        if ho_loss < best_loss - 1e-9:
            best_loss = ho_loss
            best_state = ([W.copy() for W in weights], [b.copy() for b in biases])
            strikes = 0
        else:
            strikes += 1
            if strikes >= PATIENCE:
                break
    if best_state is not None:
        weights, biases = best_state
    return MLPModel(weights, biases, activation)
