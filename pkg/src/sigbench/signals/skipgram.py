"""Skip-gram with negative sampling over walk corpora.

Single-threaded mini-batch SGD keeps training deterministic for a fixed
seed. Defaults (5 negatives from the unigram^0.75 distribution, 5 epochs,
learning rate decaying linearly from 0.025) follow common word2vec
practice and are recorded in the embedding metadata.
"""

from __future__ import annotations

import numpy as np

from .walks import WalkCorpus

NEGATIVES = 5
EPOCHS = 5
LR0 = 0.025
BATCH = 4096


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def corpus_pairs(corpus: WalkCorpus, window: int) -> tuple[np.ndarray, np.ndarray]:
    """All (center, context) pairs within the symmetric window."""
    walks, lengths = corpus.walks, corpus.lengths
    centers, contexts = [], []
    L = walks.shape[1]
    for off in range(1, window + 1):
        if off >= L:
            break
        valid = lengths > off
        left = walks[valid, :L - off]
        right = walks[valid, off:]
        mask = right >= 0
        c = left[mask]
        x = right[mask]
        centers.append(np.concatenate([c, x]))
        contexts.append(np.concatenate([x, c]))
    if not centers:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


def skipgram_train(corpus: WalkCorpus, vocab_size: int, dim: int = 64,
                   window: int = 10, seed: int = 0, epochs: int = EPOCHS,
                   negatives: int = NEGATIVES, lr0: float = LR0,
                   exact_gradient: bool = False):
    """Train SGNS embeddings; returns (matrix, meta).

    ``exact_gradient`` switches to full-batch descent with negatives fixed
    up front, which makes the loss a fixed differentiable objective whose
    value decreases monotonically across epochs (used by smoke tests).
    """
    centers, contexts = corpus_pairs(corpus, window)
    if len(centers) == 0:
        raise ValueError("empty walk corpus")
    rng = np.random.default_rng(seed)
    w_in = (rng.random((vocab_size, dim)) - 0.5) / dim
    w_out = np.zeros((vocab_size, dim))

    counts = np.bincount(contexts, minlength=vocab_size).astype(np.float64)
    noise = counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    meta = {"dim": dim, "window": window, "negatives": negatives,
            "epochs": epochs, "lr0": lr0, "pairs": int(len(centers)),
            "loss_per_epoch": []}

    if exact_gradient:
        neg = np.searchsorted(noise_cdf, rng.random((len(centers), negatives)))
        lr = lr0
        for _ in range(epochs):
            loss = _full_batch_step(w_in, w_out, centers, contexts, neg, lr)
            meta["loss_per_epoch"].append(loss)
        return w_in, meta

    n_pairs = len(centers)
    total_batches = epochs * int(np.ceil(n_pairs / BATCH))
    batch_no = 0
    for _ in range(epochs):
        order = rng.permutation(n_pairs)
        epoch_loss = 0.0
        for lo in range(0, n_pairs, BATCH):
            sel = order[lo:lo + BATCH]
            lr = lr0 * max(1e-4, 1.0 - batch_no / total_batches)
            neg = np.searchsorted(noise_cdf, rng.random((len(sel), negatives)))
            epoch_loss += _sgd_batch(w_in, w_out, centers[sel], contexts[sel],
                                     neg, lr) * len(sel)
            batch_no += 1
        meta["loss_per_epoch"].append(epoch_loss / n_pairs)
    return w_in, meta


def _scatter_step(target: np.ndarray, idx: np.ndarray, grads: np.ndarray,
                  lr: float) -> None:
    """target[i] -= lr * sum of colliding grads, with a per-row step-norm
    clip (4 * lr) so heavy index collisions cannot blow a row up."""
    order = np.argsort(idx, kind="stable")
    si = idx[order]
    sg = grads[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(si)) + 1])
    step = lr * np.add.reduceat(sg, starts, axis=0)
    norms = np.linalg.norm(step, axis=1)
    cap = 4.0 * lr
    scale = np.minimum(1.0, cap / np.maximum(norms, 1e-12))
    target[si[starts]] -= step * scale[:, None]


def _sgd_batch(w_in, w_out, c, x, neg, lr) -> float:
    v = w_in[c]                      # (B, d)
    u_pos = w_out[x]                 # (B, d)
    u_neg = w_out[neg]               # (B, K, d)
    s_pos = _sigmoid(np.einsum("bd,bd->b", v, u_pos))
    s_neg = _sigmoid(np.einsum("bd,bkd->bk", v, u_neg))
    loss = float(-np.mean(np.log(np.clip(s_pos, 1e-12, None))
                          + np.sum(np.log(np.clip(1.0 - s_neg, 1e-12, None)), axis=1)))
    g_pos = s_pos - 1.0              # d loss / d score
    g_neg = s_neg
    grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
    out_idx = np.concatenate([x, neg.ravel()])
    out_grad = np.vstack([g_pos[:, None] * v,
                          (g_neg[:, :, None] * v[:, None, :]).reshape(-1, v.shape[1])])
    _scatter_step(w_out, out_idx, out_grad, lr)
    _scatter_step(w_in, c, grad_v, lr)
    return loss


def _full_batch_step(w_in, w_out, c, x, neg, lr) -> float:
    v = w_in[c]
    u_pos = w_out[x]
    u_neg = w_out[neg]
    s_pos = _sigmoid(np.einsum("bd,bd->b", v, u_pos))
    s_neg = _sigmoid(np.einsum("bd,bkd->bk", v, u_neg))
    loss = float(-np.mean(np.log(np.clip(s_pos, 1e-12, None))
                          + np.sum(np.log(np.clip(1.0 - s_neg, 1e-12, None)), axis=1)))
    scale = lr / len(c)
    g_pos = s_pos - 1.0
    g_neg = s_neg
    grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
    d_out = np.zeros_like(w_out)
    np.add.at(d_out, x, g_pos[:, None] * v)
    np.add.at(d_out, neg.ravel(),
              (g_neg[:, :, None] * v[:, None, :]).reshape(-1, v.shape[1]))
    d_in = np.zeros_like(w_in)
    np.add.at(d_in, c, grad_v)
    w_out -= scale * d_out
    w_in -= scale * d_in
    return loss
