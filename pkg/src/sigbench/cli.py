"""Command-line interface.

Subcommands run the pipeline stages idempotently against a store
directory: synth, signals, perturb, hpo, evaluate, robustness,
significance, report, validate-embeddings. Environment:
SIGBENCH_THREADS caps evaluation workers; SIGBENCH_REPRODUCIBLE=1 (the
default) keeps deterministic single-threaded numerics.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ExperimentConfig, load_config, parse_seeds
from .graph import load_edge_list
from .report import REPORT_KINDS, report, significance_table
from .store import ResultStore
from .synth import SyntheticSpec, generate_synthetic, recovery_self_check


def _add_config_arg(p):
    p.add_argument("--config", required=True, help="experiment config (JSON)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigbench",
        description="graph-signal extraction and evaluation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a planted-partition dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--nodes", type=int, default=2000)
    p.add_argument("--communities", type=int, default=8)
    p.add_argument("--p-in", type=float, default=0.05)
    p.add_argument("--p-out", type=float, default=0.001)
    p.add_argument("--flagged", type=int, default=1)
    p.add_argument("--positive-rate", type=float, default=0.03)
    p.add_argument("--label-noise", type=float, default=0.1)
    p.add_argument("--features", type=int, default=10)
    p.add_argument("--unlabeled-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--self-check", action="store_true",
                   help="report planted-partition recovery agreement")

    p = sub.add_parser("signals", help="compute and cache configured signals")
    _add_config_arg(p)
    p.add_argument("--rho", type=float, default=None,
                   help="single perturbation level (default: all configured)")

    p = sub.add_parser("perturb", help="cache a perturbed edge list")
    _add_config_arg(p)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the configured perturbation seed")

    p = sub.add_parser("hpo", help="run hyperparameter search per cell")
    _add_config_arg(p)

    p = sub.add_parser("evaluate", help="full multi-seed evaluation")
    _add_config_arg(p)
    p.add_argument("--seeds", default=None, help='e.g. "1..10" or "1,2,3"')

    p = sub.add_parser("robustness", help="edge-removal sweep + trend report")
    _add_config_arg(p)

    p = sub.add_parser("significance", help="per-cell significance counts")
    p.add_argument("--store", required=True)

    p = sub.add_parser("report", help="write a report table + figure")
    p.add_argument("--store", required=True)
    p.add_argument("--kind", required=True, choices=REPORT_KINDS)
    p.add_argument("--out", default=None, help="output dir (default <store>/reports)")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("validate-embeddings",
                       help="check an external embedding file against a graph")
    p.add_argument("--edges", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--features", default=None,
                   help="features file binding the full node universe")
    return parser


def _cfg_with_seeds(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    seeds = getattr(args, "seeds", None)
    if seeds:
        spec = seeds if ".." in seeds else [s for s in seeds.split(",") if s]
        cfg.eval_seeds = parse_seeds(spec)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "synth":
        spec = SyntheticSpec(
            n=args.nodes, k=args.communities, p_in=args.p_in, p_out=args.p_out,
            flagged_communities=args.flagged, positive_rate=args.positive_rate,
            label_noise=args.label_noise, n_features=args.features,
            unlabeled_fraction=args.unlabeled_fraction, seed=args.seed)
        info = generate_synthetic(spec, args.out)
        print(json.dumps(info, indent=1))
        if args.self_check:
            ari = recovery_self_check(args.out)
            print(f"planted-partition recovery (adjusted agreement): {ari:.3f}")
        return 0

    if args.command == "signals":
        from .runner import load_dataset, perturbed_graph, signal_tables
        cfg = load_config(args.config)
        graph, table, labels = load_dataset(cfg)
        levels = [args.rho] if args.rho is not None else list(cfg.rho_levels)
        for rho in levels:
            g_rho = perturbed_graph(cfg, graph, rho)
            tables = signal_tables(cfg, g_rho, table, rho)
            for name, t in tables.items():
                print(f"rho={rho:g} config={name}: {t.n_cols} columns")
        return 0

    if args.command == "perturb":
        from .runner import load_dataset, perturbed_graph
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.perturbation_seed = args.seed
        graph, _, _ = load_dataset(cfg)
        out = perturbed_graph(cfg, graph, args.rho)
        print(f"perturbed graph cached: rho={args.rho:g} "
              f"seed={cfg.perturbation_seed} edges={out.m} (from {graph.m})")
        return 0

    if args.command == "hpo":
        from .runner import best_spec, load_dataset, signal_tables
        cfg = load_config(args.config)
        graph, table, labels = load_dataset(cfg)
        tables = signal_tables(cfg, graph, table, rho=0.0)
        for classifier in cfg.classifiers:
            spec = best_spec(cfg, classifier, "baseline", table, labels)
            print(f"{classifier} baseline: {spec.digest()}")
            for sc in cfg.signal_configs:
                spec = best_spec(cfg, classifier, sc.name, tables[sc.name], labels)
                print(f"{classifier} {sc.name}: {spec.digest()}")
        return 0

    if args.command == "evaluate":
        from .runner import run_experiment
        cfg = _cfg_with_seeds(args)
        store = run_experiment(cfg)
        failed = [r for r in store.records if r.status != "ok"]
        print(f"records: {len(store.records)} ({len(failed)} failed) "
              f"-> {store.records_path}")
        return 1 if failed else 0

    if args.command == "robustness":
        from .runner import run_robustness
        cfg = load_config(args.config)
        store = run_robustness(cfg)
        failed = [r for r in store.records if r.status != "ok"]
        print(f"records: {len(store.records)} ({len(failed)} failed) "
              f"-> {store.records_path}")
        return 1 if failed else 0

    if args.command == "significance":
        store = ResultStore.load(args.store)
        for row in significance_table(store):
            print(",".join(str(x) for x in row))
        return 0

    if args.command == "report":
        store = ResultStore.load(args.store)
        out_dir = args.out or (Path(args.store) / "reports")
        path = report(store, args.kind, out_dir, figures=not args.no_figures)
        print(f"wrote {path}")
        return 0

    if args.command == "validate-embeddings":
        from .signals.embeddings import load_embedding_file
        node_ids = None
        if args.features:
            with open(args.features, "r", encoding="utf-8") as fh:
                node_ids = [line.split(",", 1)[0].strip()
                            for line in fh if line.strip()]
        graph = load_edge_list(args.edges, node_ids=node_ids)
        emb = load_embedding_file(args.embedding, graph)
        print(f"ok: {emb.matrix.shape[0]} rows, dim={emb.dim}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
