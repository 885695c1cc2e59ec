"""GNN node-embedding encoders (GCN, GAT, bootstrapped-contrastive GCL).

Trains on the harness's file interfaces (Elliptic-convention dataset files
plus the per-seed split cache) and exports frozen final-layer embeddings in
the shared delimited format with a provenance sidecar.
"""

__version__ = "0.1.0"
