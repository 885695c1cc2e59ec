"""Graph-signal extraction and statistically grounded evaluation harness.

The package computes node-level graph signals (centrality, cohesion,
community, proximity, spectral, structural-role families), concatenates
them with tabular base features, and evaluates classifier families under a
multi-seed protocol with trimmed aggregation, paired McNemar testing and
edge-removal robustness sweeps.
"""

__version__ = "0.1.0"

PROTOCOL_SEED = 42
