"""Training loops: supervised (GCN/GAT) and bootstrapped-contrastive (GCL).

Supervised encoders optimize class-weighted cross-entropy on training
labels only, with early stopping on validation loss (patience 20, cap 200
epochs); validation labels are read for the stopping criterion, never for
gradients. GCL pretrains for a fixed 100 epochs on two edge-dropped views
with a cosine bootstrap objective (EMA target network). Both paths use
Adam and log their loss history.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from .data import GraphData, Split
from .encoders import EncoderSpec, build_encoder, symmetric_edges

SUPERVISED_MAX_EPOCHS = 200
SUPERVISED_PATIENCE = 20
GCL_PRETRAIN_EPOCHS = 100


class DivergenceError(RuntimeError):
    pass


@dataclass
class TrainedEncoder:
    spec: EncoderSpec
    encoder: nn.Module
    head: nn.Module | None
    seed: int
    loss_history: list = field(default_factory=list)
    val_history: list = field(default_factory=list)
    defaults: dict = field(default_factory=dict)

    def embed(self, data: GraphData) -> np.ndarray:
        """Frozen final-encoder-layer activations for every node."""
        self.encoder.eval()
        with torch.no_grad():
            x = torch.as_tensor(data.features)
            edges = symmetric_edges(data.edge_src, data.edge_dst, data.n)
            z = self.encoder(x, edges)
        out = z.numpy().astype(np.float64)
        if not np.all(np.isfinite(out)):
            raise DivergenceError(
                f"non-finite activations in export (spec {self.spec.digest()})")
        return out


def _class_weights(y_train: torch.Tensor) -> torch.Tensor:
    counts = torch.bincount(y_train, minlength=2).float()
    w = y_train.numel() / (2.0 * counts.clamp(min=1.0))
    return w / w.mean()


def train_encoder(spec: EncoderSpec, data: GraphData, split: Split,
                  seed: int, max_epochs: int | None = None) -> TrainedEncoder:
    """Train one encoder; deterministic for a fixed seed."""
    torch.manual_seed(seed)
    if spec.architecture == "gcl":
        return _train_gcl(spec, data, seed, max_epochs or GCL_PRETRAIN_EPOCHS)
    return _train_supervised(spec, data, split, seed,
                             max_epochs or SUPERVISED_MAX_EPOCHS)


def _train_supervised(spec, data, split, seed, max_epochs) -> TrainedEncoder:
    x = torch.as_tensor(data.features)
    edges = symmetric_edges(data.edge_src, data.edge_dst, data.n)
    y = torch.as_tensor(data.labels)
    train_idx = torch.as_tensor(split.train)
    val_idx = torch.as_tensor(split.val)
    encoder = build_encoder(x.shape[1], spec)
    head = nn.Linear(spec.hidden_sizes[-1], 2)
    params = list(encoder.parameters()) + list(head.parameters())
    opt = torch.optim.Adam(params, lr=spec.learning_rate)
    weights = _class_weights(y[train_idx])
    loss_fn = nn.CrossEntropyLoss(weight=weights)
    val_fn = nn.CrossEntropyLoss()

    history, val_history = [], []
    best_val = float("inf")
    best_state = None
    strikes = 0
    for _ in range(max_epochs):
        encoder.train()
        opt.zero_grad()
        logits = head(encoder(x, edges))
        # gradients flow through training labels only
        loss = loss_fn(logits[train_idx], y[train_idx])
        if not torch.isfinite(loss):
            raise DivergenceError(f"non-finite loss (spec {spec.digest()})")
        loss.backward()
        opt.step()
        history.append(float(loss.detach()))
        encoder.eval()
        with torch.no_grad():
            val_loss = float(val_fn(head(encoder(x, edges))[val_idx], y[val_idx]))
        val_history.append(val_loss)
        if val_loss < best_val - 1e-6:
            best_val = val_loss
            best_state = (copy.deepcopy(encoder.state_dict()),
                          copy.deepcopy(head.state_dict()))
            strikes = 0
        else:
            strikes += 1
            if strikes >= SUPERVISED_PATIENCE:
                break
    if best_state is not None:
        encoder.load_state_dict(best_state[0])
        head.load_state_dict(best_state[1])
    return TrainedEncoder(spec, encoder, head, seed, history, val_history,
                          defaults={"max_epochs": max_epochs,
                                    "patience": SUPERVISED_PATIENCE,
                                    "optimizer": "adam"})


def _drop_edges(src, dst, prob, gen) -> torch.Tensor:
    keep = torch.rand(len(src), generator=gen) >= prob
    return src[keep], dst[keep]


def _train_gcl(spec, data, seed, epochs) -> TrainedEncoder:
    """Bootstrapped two-view contrastive pretraining (no labels consumed)."""
    x = torch.as_tensor(data.features)
    src = torch.as_tensor(data.edge_src)
    dst = torch.as_tensor(data.edge_dst)
    gen = torch.Generator().manual_seed(seed)
    online = build_encoder(x.shape[1], spec)
    target = copy.deepcopy(online)
    for p in target.parameters():
        p.requires_grad_(False)
    predictor = nn.Sequential(
        nn.Linear(spec.hidden_sizes[-1], spec.hidden_sizes[-1]),
        nn.PReLU(),
        nn.Linear(spec.hidden_sizes[-1], spec.hidden_sizes[-1]))
    opt = torch.optim.Adam(list(online.parameters())
                           + list(predictor.parameters()),
                           lr=spec.learning_rate)
    history = []
    for _ in range(epochs):
        online.train()
        opt.zero_grad()
        views = []
        for _view in range(2):
            s, d = _drop_edges(src, dst, spec.edge_drop_prob, gen)
            views.append(symmetric_edges(s, d, data.n))
        z1 = online(x, views[0])
        z2 = online(x, views[1])
        with torch.no_grad():
            t1 = target(x, views[0])
            t2 = target(x, views[1])
        p1, p2 = predictor(z1), predictor(z2)
        loss = (2.0 - 2.0 * nn.functional.cosine_similarity(p1, t2).mean()
                + 2.0 - 2.0 * nn.functional.cosine_similarity(p2, t1).mean()) / 2
        if not torch.isfinite(loss):
            raise DivergenceError(f"non-finite loss (spec {spec.digest()})")
        loss.backward()
        opt.step()
        with torch.no_grad():
            for po, pt in zip(online.parameters(), target.parameters()):
                pt.mul_(spec.momentum).add_(po, alpha=1 - spec.momentum)
        history.append(float(loss.detach()))
    return TrainedEncoder(spec, online, None, seed, history, [],
                          defaults={"pretrain_epochs": epochs,
                                    "momentum": spec.momentum,
                                    "optimizer": "adam"})
