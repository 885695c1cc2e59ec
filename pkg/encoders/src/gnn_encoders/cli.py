"""Train-and-export command line.

Example::

    gnn-encoders train --arch gcn --features features.csv \
        --classes classes.csv --edges edges.csv --split splits/seed_1.csv \
        --hidden 64,32 --seed 1 --out exports/gcn.csv
"""

from __future__ import annotations

import argparse
import sys

from .data import load_dataset, load_split
from .encoders import EncoderSpec
from .export import export_embeddings
from .training import train_encoder


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gnn-encoders")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("train", help="train one encoder and export embeddings")
    p.add_argument("--arch", required=True, choices=["gcn", "gat", "gcl"])
    p.add_argument("--features", required=True)
    p.add_argument("--classes", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--split", required=True, help="harness split cache file")
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", default="64",
                   help="comma-separated layer widths, e.g. 64,32")
    p.add_argument("--activation", default="relu")
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--lr", type=float, default=5e-3)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--edge-drop", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-epochs", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = EncoderSpec(
            architecture=args.arch,
            hidden_sizes=tuple(int(w) for w in args.hidden.split(",")),
            activation=args.activation, dropout=args.dropout,
            learning_rate=args.lr, heads=args.heads,
            edge_drop_prob=args.edge_drop)
        data = load_dataset(args.features, args.classes, args.edges)
        split = load_split(args.split, data.ids)
        trained = train_encoder(spec, data, split, args.seed,
                                max_epochs=args.max_epochs)
        path = export_embeddings(trained, data, args.out, split)
        print(f"exported {path} ({data.n} rows, dim={spec.hidden_sizes[-1]}); "
              f"loss {trained.loss_history[0]:.4f} -> {trained.loss_history[-1]:.4f}")
        return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
