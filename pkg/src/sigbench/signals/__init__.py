"""Node-level graph signals grouped by taxonomic family."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CATEGORIES = ("Centrality", "Cohesion", "Community", "Proximity",
              "Spectral", "Structural", "GNN")


@dataclass
class NodeSignal:
    """One named signal: one or more node-aligned real columns.

    ``values`` has shape (node_count, len(components)); column j serializes
    as ``<name>.<components[j]>``.
    """

    name: str
    category: str
    components: list
    values: np.ndarray
    directedness: str = "undirected"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if self.values.shape[0] == 1 and len(self.components) == 1:
            self.values = self.values.T
        if self.values.shape[1] != len(self.components):
            raise ValueError(f"{self.name}: {self.values.shape[1]} columns for "
                             f"{len(self.components)} component names")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.name}: non-finite signal values")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")

    @property
    def column_names(self) -> list:
        return [f"{self.name}.{c}" for c in self.components]

    @property
    def node_count(self) -> int:
        return self.values.shape[0]


@dataclass
class CommunityPartition:
    """Total node-to-community assignment plus its objective value."""

    assignment: np.ndarray
    quality: float
    algorithm: str = ""

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        labels = np.unique(self.assignment)
        if len(labels) and (labels[0] != 0 or labels[-1] != len(labels) - 1):
            raise ValueError("community indices must be contiguous from 0")

    @property
    def n_communities(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_communities)
