"""Protocol orchestration: signals, HPO, multi-seed evaluation, robustness.

For every perturbation level the graph is perturbed and signals are
recomputed (cached per level); hyperparameters are optimized once per
(classifier, signal configuration) on the unperturbed graph at the HPO
seed and frozen; evaluation then trains baseline and augmented models on
identical per-seed splits and pairs their test predictions through
McNemar. Cells never share mutable state, every random stream is keyed by
cell identity, and failed cells are recorded without aborting the sweep.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import (LabelVector, concat_signals, load_node_table,
                       save_split, stratified_split)
from .config import ExperimentConfig
from .graph import Graph, PerturbationSpec, load_edge_list, remove_edges
from .models import ModelSpec
from .models.spaces import SEARCH_SPACES
from .models.tpe import hpo_search
from .pipeline import fit_pipeline, hpo_objective
from .signals.registry import SignalContext, compute_signal
from .stats import mcnemar, metrics
from .store import ResultStore, RunRecord


def reproducible_mode() -> bool:
    return os.environ.get("SIGBENCH_REPRODUCIBLE", "1") != "0"


def worker_count() -> int:
    return max(1, int(os.environ.get("SIGBENCH_THREADS", "1")))


def load_dataset(cfg: ExperimentConfig):
    base_columns = cfg.dataset.get("base_columns")
    table, labels = load_node_table(cfg.dataset["features"],
                                    cfg.dataset["classes"],
                                    None if base_columns is None
                                    else tuple(base_columns))
    graph = load_edge_list(cfg.dataset["edges"], node_ids=table.ids)
    return graph, table, labels


def dataset_tag(cfg: ExperimentConfig) -> str:
    """Short content digest keying caches to the dataset, not its path."""
    import hashlib
    from .config import _dataset_digests
    payload = json.dumps(_dataset_digests(cfg.dataset), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:10]


def perturbed_graph(cfg: ExperimentConfig, graph: Graph, rho: float) -> Graph:
    """Perturb and cache the edge list for one removal level."""
    if rho == 0.0:
        return graph
    cache_dir = Path(cfg.output_dir) / "perturbed"
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache = cache_dir / (f"{dataset_tag(cfg)}_rho_{rho:g}"
                         f"_seed_{cfg.perturbation_seed}.npz")
    if cache.exists():
        blob = np.load(cache)
        return Graph(graph.external_ids, blob["src"], blob["dst"])
    out = remove_edges(graph, PerturbationSpec(rho=rho, seed=cfg.perturbation_seed))
    np.savez_compressed(cache, src=out.src, dst=out.dst)
    return out


def signal_tables(cfg: ExperimentConfig, graph: Graph, table, rho: float):
    """Concatenated feature table per signal configuration at one rho."""
    ctx = SignalContext(
        protocol_seed=cfg.hpo_seed,
        embedding_dir=cfg.embedding_dir,
        cache_dir=(Path(cfg.output_dir) / "signals"
                   / f"{dataset_tag(cfg)}_rho_{rho:g}"))
    tables = {}
    for sc in cfg.signal_configs:
        sigs = [compute_signal(name, graph, ctx) for name in sc.signals]
        tables[sc.name] = concat_signals(table, sigs)
    return tables


def _split_for_seed(cfg, labels: LabelVector, ids, seed: int):
    split = stratified_split(labels, seed)
    split_dir = Path(cfg.output_dir) / "splits"
    split_dir.mkdir(parents=True, exist_ok=True)
    path = split_dir / f"seed_{seed}.csv"
    if not path.exists():
        save_split(split, ids, path)
    return split


def _hpo_cache_path(cfg, classifier: str, config_name: str) -> Path:
    d = Path(cfg.output_dir) / "hpo"
    d.mkdir(parents=True, exist_ok=True)
    return d / f"{classifier}__{config_name}.json"


def best_spec(cfg: ExperimentConfig, classifier: str, config_name: str,
              table, labels: LabelVector) -> ModelSpec:
    """HPO at the protocol seed, frozen and cached per (classifier, config)."""
    cache = _hpo_cache_path(cfg, classifier, config_name)
    if cache.exists():
        blob = json.loads(cache.read_text())
        return ModelSpec(classifier, _revive_params(classifier, blob["best"]))
    split = stratified_split(labels, cfg.hpo_seed)
    objective = hpo_objective(table, labels.labels, classifier, split,
                              cfg.hpo_seed)
    best_params, trials = hpo_search(SEARCH_SPACES[classifier], objective,
                                     budget=cfg.hpo_budget, seed=cfg.hpo_seed)
    spec = ModelSpec(classifier, best_params)
    payload = {"classifier": classifier, "config": config_name,
               "best": _jsonable_params(best_params),
               "spec_digest": spec.digest(),
               "trials": [t.as_dict() for t in trials]}
    cache.write_text(json.dumps(payload, indent=1, sort_keys=True))
    return spec


def _jsonable_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, tuple):
            out[k] = {"__tuple__": list(v)}
        elif isinstance(v, (np.integer,)):
            out[k] = int(v)
        elif isinstance(v, (np.floating,)):
            out[k] = float(v)
        else:
            out[k] = v
    return out


def _revive_params(family: str, params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, dict) and "__tuple__" in v:
            out[k] = tuple(v["__tuple__"])
        else:
            out[k] = v
    return out


def run_experiment(cfg: ExperimentConfig) -> ResultStore:
    """Full protocol over every (rho, classifier, config, seed) cell."""
    graph, table, labels = load_dataset(cfg)
    manifest = {
        "config_digest": cfg.digest(),
        "code_version": __version__,
        "classifiers": list(cfg.classifiers),
        "signal_configs": [sc.as_dict() for sc in cfg.signal_configs],
        "eval_seeds": list(cfg.eval_seeds),
        "rho_levels": list(cfg.rho_levels),
        "hpo": {"seed": cfg.hpo_seed, "budget": cfg.hpo_budget},
        "exclude_nb": cfg.exclude_nb,
        "reproducible": reproducible_mode(),
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    store = ResultStore.create(cfg.output_dir, manifest)

    # HPO is anchored to the unperturbed graph and reused across rho levels
    base_tables = signal_tables(cfg, graph, table, rho=0.0)
    specs: dict = {}
    for classifier in cfg.classifiers:
        specs[(classifier, "baseline")] = best_spec(cfg, classifier,
                                                    "baseline", table, labels)
        for sc in cfg.signal_configs:
            specs[(classifier, sc.name)] = best_spec(
                cfg, classifier, sc.name, base_tables[sc.name], labels)

    for rho in cfg.rho_levels:
        g_rho = perturbed_graph(cfg, graph, rho)
        tables = base_tables if rho == 0.0 else signal_tables(cfg, g_rho, table, rho)
        for classifier in cfg.classifiers:
            workers = worker_count()
            run_seed = lambda seed: _evaluate_seed_cells(  # noqa: E731
                cfg, classifier, seed, rho, table, tables, labels, specs)
            if workers > 1:
                from concurrent.futures import ThreadPoolExecutor
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    batches = list(pool.map(run_seed, cfg.eval_seeds))
            else:
                batches = [run_seed(seed) for seed in cfg.eval_seeds]
            # single writer appends in seed order regardless of scheduling
            for batch in batches:
                for record in batch:
                    store.append(record)
    return store


def _evaluate_seed_cells(cfg, classifier, seed, rho, base_table,
                         tables, labels, specs) -> list:
    """Baseline + augmented cells for one (classifier, seed, rho); returns
    the records instead of writing them so scheduling never reorders the
    store."""
    split = _split_for_seed(cfg, labels, base_table.ids, seed)
    y = labels.labels
    repro = reproducible_mode()
    records = []
    base_pred = None
    t0 = time.perf_counter()
    try:
        base_pipe = fit_pipeline(base_table, y, specs[(classifier, "baseline")],
                                 split.train, seed)
        base_pred = base_pipe.predict(base_table.values[split.test])
        m = metrics(base_pred, y[split.test])
        records.append(RunRecord(
            classifier=classifier, config_name="baseline", signals=[],
            category="Baseline", seed=seed, rho=rho, metrics=m.as_dict(),
            mcnemar=None, spec_digest=specs[(classifier, "baseline")].digest(),
            split_digest=split.digest(), reproducible=repro,
            wall_clock=time.perf_counter() - t0))
    except Exception as exc:  # noqa: BLE001 - cell failures must not abort sweeps
        records.append(RunRecord(
            classifier=classifier, config_name="baseline", signals=[],
            category="Baseline", seed=seed, rho=rho, status="failed",
            reason=str(exc), split_digest=split.digest(), reproducible=repro,
            wall_clock=time.perf_counter() - t0))

    for sc in cfg.signal_configs:
        t1 = time.perf_counter()
        try:
            pipe = fit_pipeline(tables[sc.name], y, specs[(classifier, sc.name)],
                                split.train, seed)
            pred = pipe.predict(tables[sc.name].values[split.test])
            m = metrics(pred, y[split.test])
            mc = (mcnemar(base_pred, pred, y[split.test]).as_dict()
                  if base_pred is not None else None)
            records.append(RunRecord(
                classifier=classifier, config_name=sc.name, signals=sc.signals,
                category=sc.category, seed=seed, rho=rho, metrics=m.as_dict(),
                mcnemar=mc, spec_digest=specs[(classifier, sc.name)].digest(),
                split_digest=split.digest(), reproducible=repro,
                wall_clock=time.perf_counter() - t1))
        except Exception as exc:  # noqa: BLE001
            records.append(RunRecord(
                classifier=classifier, config_name=sc.name, signals=sc.signals,
                category=sc.category, seed=seed, rho=rho, status="failed",
                reason=str(exc), split_digest=split.digest(), reproducible=repro,
                wall_clock=time.perf_counter() - t1))
    return records


def run_robustness(cfg: ExperimentConfig) -> ResultStore:
    """Edge-removal sweep; requires at least two rho levels including 0."""
    if len(cfg.rho_levels) < 2:
        raise ValueError("robustness sweep needs more than one perturbation level")
    store = run_experiment(cfg)
    from .report import report
    report(store, "robustness-trend", Path(cfg.output_dir) / "reports")
    return store
