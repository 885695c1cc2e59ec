"""Encoder architectures and their hyperparameter domains.

Width constraints follow the published search space: hidden sizes for
layers 2/3/4 live in 8-127 / 8-63 / 8-31 with strictly decreasing widths
from layer 3 on. GAT adds multi-head attention (1/2/4/8 heads, optional
residual, attention and feature dropout); GCL wraps a GCN encoder in a
bootstrapped two-view objective with edge-drop augmentation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import torch
import torch.nn as nn

ACTIVATIONS = {
    "relu": torch.relu,
    "elu": torch.nn.functional.elu,
    "gelu": torch.nn.functional.gelu,
    "leaky_relu": torch.nn.functional.leaky_relu,
    "silu": torch.nn.functional.silu,
}

HIDDEN_RANGES = {2: (8, 127), 3: (8, 63), 4: (8, 31)}
GAT_HEAD_CHOICES = (1, 2, 4, 8)
GCL_HIDDEN_CHOICES = (32, 64, 128)
EDGE_DROP_RANGE = (0.1, 0.4)


@dataclass
class EncoderSpec:
    architecture: str                 # gcn | gat | gcl
    hidden_sizes: tuple = (64,)
    activation: str = "relu"
    dropout: float = 0.1
    learning_rate: float = 5e-3
    reduce: str = "mean"              # gcn aggregation
    bias: bool = True
    heads: int = 4                    # gat
    residual: bool = False
    attention_dropout: float = 0.1
    negative_slope: float = 0.2
    edge_drop_prob: float = 0.2       # gcl augmentation
    momentum: float = 0.99            # gcl target EMA

    def __post_init__(self):
        if self.architecture not in ("gcn", "gat", "gcl"):
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if not 1 <= len(self.hidden_sizes) <= 4:
            raise ValueError("1-4 layers supported")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        for depth, width in enumerate(self.hidden_sizes, start=1):
            if depth == 1:
                continue
            lo, hi = HIDDEN_RANGES[min(depth, 4)]
            if not lo <= width <= hi:
                raise ValueError(f"layer {depth} width {width} outside [{lo}, {hi}]")
        for i in range(2, len(self.hidden_sizes)):
            if not self.hidden_sizes[i] < self.hidden_sizes[i - 1]:
                raise ValueError("widths must strictly decrease from layer 3 on")
        if self.architecture == "gat" and self.heads not in GAT_HEAD_CHOICES:
            raise ValueError(f"heads must be one of {GAT_HEAD_CHOICES}")
        if self.architecture == "gcl":
            if self.hidden_sizes[-1] not in GCL_HIDDEN_CHOICES:
                raise ValueError(f"gcl hidden_dim must be one of {GCL_HIDDEN_CHOICES}")
            if not EDGE_DROP_RANGE[0] <= self.edge_drop_prob <= EDGE_DROP_RANGE[1]:
                raise ValueError(f"edge_drop_prob outside {EDGE_DROP_RANGE}")

    def digest(self) -> str:
        payload = json.dumps(
            {k: (list(v) if isinstance(v, tuple) else v)
             for k, v in sorted(self.__dict__.items())}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def symmetric_edges(edge_src, edge_dst, n) -> torch.Tensor:
    """Undirected edge index with self-loops, as a (2, E) long tensor."""
    src = torch.as_tensor(edge_src, dtype=torch.long)
    dst = torch.as_tensor(edge_dst, dtype=torch.long)
    loop = torch.arange(n, dtype=torch.long)
    return torch.stack([torch.cat([src, dst, loop]),
                        torch.cat([dst, src, loop])])


class GCNLayer(nn.Module):
    def __init__(self, in_dim, out_dim, reduce="mean", bias=True):
        super().__init__()
        if reduce not in ("sum", "mean", "max"):
            raise ValueError(f"unknown reduce {reduce!r}")
        self.linear = nn.Linear(in_dim, out_dim, bias=bias)
        self.reduce = reduce

    def forward(self, x, edge_index):
        src, dst = edge_index[0], edge_index[1]
        if self.reduce == "max":
            agg = torch.full_like(x, -torch.inf)
            agg = agg.scatter_reduce(0, dst.unsqueeze(-1).expand(-1, x.shape[1]),
                                     x[src], "amax", include_self=False)
            agg = torch.where(torch.isinf(agg), torch.zeros_like(agg), agg)
        else:
            agg = torch.zeros_like(x).index_add(0, dst, x[src])
            if self.reduce == "mean":
                deg = torch.zeros(x.shape[0], dtype=x.dtype).index_add(
                    0, dst, torch.ones(len(dst), dtype=x.dtype))
                agg = agg / deg.clamp(min=1.0).unsqueeze(-1)
        return self.linear(agg)


class GCNEncoder(nn.Module):
    def __init__(self, in_dim, spec: EncoderSpec):
        super().__init__()
        dims = [in_dim, *spec.hidden_sizes]
        self.layers = nn.ModuleList(
            GCNLayer(a, b, spec.reduce, spec.bias)
            for a, b in zip(dims[:-1], dims[1:]))
        self.act = ACTIVATIONS[spec.activation]
        self.dropout = spec.dropout

    def forward(self, x, edge_index):
        for i, layer in enumerate(self.layers):
            x = layer(x, edge_index)
            if i < len(self.layers) - 1:
                x = self.act(x)
                x = nn.functional.dropout(x, self.dropout, self.training)
        return x


class GATLayer(nn.Module):
    def __init__(self, in_dim, out_dim, heads, spec: EncoderSpec,
                 concat=True):
        super().__init__()
        self.heads = heads
        self.out_dim = out_dim
        self.concat = concat
        self.W = nn.Linear(in_dim, heads * out_dim, bias=False)
        self.a_src = nn.Parameter(torch.empty(heads, out_dim))
        self.a_dst = nn.Parameter(torch.empty(heads, out_dim))
        nn.init.xavier_uniform_(self.a_src)
        nn.init.xavier_uniform_(self.a_dst)
        self.negative_slope = spec.negative_slope
        self.attention_dropout = spec.attention_dropout
        self.residual = spec.residual
        if self.residual:
            out_total = heads * out_dim if concat else out_dim
            self.res_proj = (nn.Identity() if in_dim == out_total
                             else nn.Linear(in_dim, out_total, bias=False))

    def forward(self, x, edge_index):
        n = x.shape[0]
        h = self.W(x).view(n, self.heads, self.out_dim)
        src, dst = edge_index[0], edge_index[1]
        e = (h[src] * self.a_src).sum(-1) + (h[dst] * self.a_dst).sum(-1)
        e = nn.functional.leaky_relu(e, self.negative_slope)
        # softmax over each destination's incoming edges, per head
        e = e - e.max()
        num = torch.exp(e)
        denom = torch.zeros(n, self.heads, dtype=num.dtype)
        denom = denom.index_add(0, dst, num)
        alpha = num / (denom[dst] + 1e-16)
        alpha = nn.functional.dropout(alpha, self.attention_dropout,
                                      self.training)
        out = torch.zeros(n, self.heads, self.out_dim, dtype=h.dtype)
        out = out.index_add(0, dst, alpha.unsqueeze(-1) * h[src])
        out = out.reshape(n, -1) if self.concat else out.mean(dim=1)
        if self.residual:
            out = out + self.res_proj(x)
        return out


class GATEncoder(nn.Module):
    def __init__(self, in_dim, spec: EncoderSpec):
        super().__init__()
        # hidden layers concatenate heads, the final layer averages them
        self.layers = nn.ModuleList()
        cur = in_dim
        for i, width in enumerate(spec.hidden_sizes):
            last = i == len(spec.hidden_sizes) - 1
            self.layers.append(GATLayer(cur, width, spec.heads, spec,
                                        concat=not last))
            cur = width * spec.heads if not last else width
        self.act = ACTIVATIONS[spec.activation]
        self.dropout = spec.dropout

    def forward(self, x, edge_index):
        for i, layer in enumerate(self.layers):
            x = nn.functional.dropout(x, self.dropout, self.training)
            x = layer(x, edge_index)
            if i < len(self.layers) - 1:
                x = self.act(x)
        return x


def build_encoder(in_dim: int, spec: EncoderSpec) -> nn.Module:
    if spec.architecture == "gat":
        return GATEncoder(in_dim, spec)
    return GCNEncoder(in_dim, spec)
