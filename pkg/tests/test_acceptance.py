"""Acceptance suite: one test per protocol-level criterion.

Each criterion prints a PASS/FAIL line with its runtime (run pytest with
-s to see them live). The full-scale Elliptic reproduction is optional and
runs only when SIGBENCH_ELLIPTIC_DIR points at the dataset files.
"""

import json
import os
import shutil
import time
from pathlib import Path

import numpy as np
import pytest

from sigbench.config import load_config
from sigbench.graph import Graph
from sigbench.report import report
from sigbench.runner import run_experiment
from sigbench.stats import (McNemarResult, chi_square_sf, delta_f1, mcnemar,
                            metrics, significance_counts, trimmed_mean)
from sigbench.store import ResultStore, canonical_store_bytes
from sigbench.synth import SyntheticSpec, generate_synthetic

from conftest import build_graph
from oracles import (betweenness_oracle, closeness_oracle, clustering_oracle,
                     core_number_oracle, eigenvector_oracle, pagerank_oracle,
                     random_graph, triangles_oracle)

# acceptance dataset: planted partition, ~3% positives, one-sided label
# noise 0.1. Base features carry no label signal (feature_shift 0) so the
# labels depend on structure alone: the baseline is pinned at the floor and
# the McNemar discordance budget is maximal.
E2E_SYNTH = dict(n=2000, k=8, p_in=0.10, p_out=0.0005, positive_rate=0.03,
                 label_noise=0.1, feature_shift=0.0, unlabeled_fraction=0.0,
                 seed=7)


def _announce(name: str, ok: bool, started: float, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {name}: {status} ({time.time() - started:.1f}s)"
    if detail:
        line += f" {detail}"
    print("\n" + line, flush=True)
    assert ok, line


# --------------------------------------------------------------------------
# criterion: signal-oracle suite (< 30 s)
# --------------------------------------------------------------------------

def test_signal_oracle_suite():
    from sigbench.signals.classic import (betweenness_approx,
                                          clustering_coefficient,
                                          closeness_centrality, core_number,
                                          eigenvector_centrality, pagerank,
                                          triangle_count)
    t0 = time.time()
    rng = np.random.default_rng(123)
    n_graphs = 0
    for trial in range(20):
        n = int(rng.integers(10, 51))
        p = float(rng.uniform(0.05, 0.3))
        edges = random_graph(n, p, seed=1000 + trial)
        if not edges:
            edges = [(0, 1)]
        g = build_graph(n, edges)
        n_graphs += 1
        assert closeness_centrality(g).values.ravel() == pytest.approx(
            closeness_oracle(n, edges), abs=1e-12)
        assert betweenness_approx(g).values.ravel() == pytest.approx(
            betweenness_oracle(n, edges), abs=1e-9)
        assert triangle_count(g).values.ravel().tolist() == \
            triangles_oracle(n, edges).tolist()
        assert core_number(g).values.ravel().tolist() == \
            core_number_oracle(n, edges).tolist()
        assert clustering_coefficient(g).values.ravel() == pytest.approx(
            clustering_oracle(n, edges), abs=1e-12)
        assert pagerank(g).values.ravel() == pytest.approx(
            pagerank_oracle(n, edges), abs=1e-6)
        assert eigenvector_centrality(g).values.ravel() == pytest.approx(
            eigenvector_oracle(n, edges), abs=1e-6)
    elapsed = time.time() - t0
    _announce("signal-oracle-suite", elapsed < 30.0, t0,
              f"[{n_graphs} graphs, {elapsed:.1f}s < 30s]")


# --------------------------------------------------------------------------
# criterion: statistics golden suite (< 1 s)
# --------------------------------------------------------------------------

def test_statistics_golden_suite():
    t0 = time.time()
    ok = True
    ok &= abs(trimmed_mean([0.5, 0.1, 0.3, 0.4, 0.2]) - 0.3) < 1e-12
    ok &= trimmed_mean([0.7] * 10) == pytest.approx(0.7)
    ok &= delta_f1(0.82, 0.79) == pytest.approx(0.03)

    def _mc(b, c):
        truth = np.zeros(b + c + 10, dtype=int)
        base = truth.copy()
        aug = truth.copy()
        aug[:b] = 1
        base[b:b + c] = 1
        return mcnemar(base, aug, truth)

    r = _mc(10, 0)
    ok &= r.chi2 == pytest.approx(8.1, abs=1e-12)
    ok &= abs(r.p - 0.004427) < 1e-5
    r = _mc(5, 5)
    ok &= r.chi2 == pytest.approx(0.1, abs=1e-12)
    ok &= abs(r.p - 0.7518) < 1e-4
    r = _mc(0, 0)
    ok &= r.p == 1.0 and r.direction == "none"
    ok &= abs(chi_square_sf(3.841) - 0.05) < 5e-4
    ok &= abs(chi_square_sf(6.635) - 0.01) < 5e-4
    elapsed = time.time() - t0
    _announce("statistics-golden-suite", bool(ok) and elapsed < 1.0, t0,
              f"[{elapsed * 1000:.0f}ms < 1s]")


# --------------------------------------------------------------------------
# criterion: paired-design audit + determinism (< 2 min)
# --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def audit_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("audit")
    spec = SyntheticSpec(n=400, k=4, p_in=0.15, p_out=0.004,
                         positive_rate=0.08, seed=3)
    generate_synthetic(spec, root / "data")
    cfg = {
        "version": 1,
        "dataset": {"edges": "data/edges.csv", "features": "data/features.csv",
                    "classes": "data/classes.csv"},
        "signals": ["degree", "pagerank"],
        "classifiers": ["logreg", "gnb"],
        "hpo": {"seed": 42, "budget": 4},
        "eval_seeds": [1, 2, 3],
        "perturbation": {"levels": [0.0], "seed": 42},
        "output_dir": "run_a",
    }
    (root / "cfg_a.json").write_text(json.dumps(cfg))
    cfg["output_dir"] = "run_b"
    (root / "cfg_b.json").write_text(json.dumps(cfg))
    t0 = time.time()
    store_a = run_experiment(load_config(root / "cfg_a.json"))
    elapsed_a = time.time() - t0
    store_b = run_experiment(load_config(root / "cfg_b.json"))
    return root, store_a, store_b, elapsed_a


def test_paired_design_audit(audit_runs):
    t0 = time.time()
    root, store, _, elapsed_run = audit_runs
    # every (classifier, seed) family shares exactly one split digest
    families = {}
    for r in store.records:
        families.setdefault((r.classifier, r.seed), set()).add(r.split_digest)
    shared = all(len(d) == 1 for d in families.values())
    # completeness formula: classifiers x (configs + 1) x seeds x rho levels
    expected = 2 * (2 + 1) * 3 * 1
    complete = len(store.records) == expected
    missing, failed = store.completeness(["logreg", "gnb"],
                                         ["degree", "pagerank"], [1, 2, 3],
                                         [0.0])
    ok = shared and complete and not missing and not failed
    _announce("paired-design-audit", ok and elapsed_run < 120, t0,
              f"[records={len(store.records)}=={expected}, "
              f"run {elapsed_run:.1f}s < 120s]")


def test_determinism_byte_identical_stores(audit_runs):
    t0 = time.time()
    root, store_a, store_b, _ = audit_runs
    same = canonical_store_bytes(store_a.directory) == \
        canonical_store_bytes(store_b.directory)
    _announce("determinism", same, t0, "[stores byte-identical mod timing]")


# --------------------------------------------------------------------------
# criterion: synthetic end-to-end signal utility (< 15 min)
#            + robustness monotonicity (< 45 min)
# --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def synth_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("protocol")
    generate_synthetic(SyntheticSpec(**E2E_SYNTH), root / "data")
    return root


@pytest.fixture(scope="module")
def protocol_store(synth_dataset):
    root = synth_dataset
    cfg = {
        "version": 1,
        "dataset": {"edges": "data/edges.csv", "features": "data/features.csv",
                    "classes": "data/classes.csv"},
        "signals": ["louvain", "node2vec_balanced"],
        "classifiers": ["random_forest"],
        "hpo": {"seed": 42, "budget": 12},
        "eval_seeds": "1..10",
        "perturbation": {"levels": [0.0], "seed": 42},
        "output_dir": "out_e2e",
    }
    (root / "cfg.json").write_text(json.dumps(cfg))
    t0 = time.time()
    store = run_experiment(load_config(root / "cfg.json"))
    return root, store, time.time() - t0


@pytest.fixture(scope="module")
def robustness_store(synth_dataset):
    root = synth_dataset
    cfg = {
        "version": 1,
        "dataset": {"edges": "data/edges.csv", "features": "data/features.csv",
                    "classes": "data/classes.csv"},
        "signals": ["node2vec_balanced"],
        "classifiers": ["random_forest"],
        "hpo": {"seed": 42, "budget": 12},
        "eval_seeds": "1..10",
        "perturbation": {"levels": [0.0, 0.25, 0.5], "seed": 42},
        "output_dir": "out_robust",
    }
    (root / "cfg_robust.json").write_text(json.dumps(cfg))
    t0 = time.time()
    store = run_experiment(load_config(root / "cfg_robust.json"))
    return root, store, time.time() - t0


def _config_stats(store, config, rho):
    seeds = store.manifest["eval_seeds"]
    aug, base, mres = {}, {}, {}
    for r in store.ok_records():
        if r.rho != rho:
            continue
        if r.config_name == config:
            aug[r.seed] = r.metrics["f1"]
            mres[r.seed] = McNemarResult(**r.mcnemar)
        elif r.config_name == "baseline":
            base[r.seed] = r.metrics["f1"]
    d = delta_f1(trimmed_mean([aug[s] for s in seeds]),
                 trimmed_mean([base[s] for s in seeds]))
    sig = significance_counts([mres[s] for s in seeds])
    return d, sig


def test_synthetic_end_to_end_utility(protocol_store):
    t0 = time.time()
    root, store, elapsed_run = protocol_store
    failures = [r for r in store.records if r.status != "ok"]
    detail = []
    ok = not failures
    for config in ("louvain", "node2vec_balanced"):
        d, sig = _config_stats(store, config, rho=0.0)
        detail.append(f"{config}: dF1={d:+.3f} n_better={sig.n_better}/10")
        ok = ok and d >= 0.05 and sig.n_better >= 8
    # the shared store build covers this criterion's budget
    ok = ok and elapsed_run < 15 * 60
    _announce("synthetic-end-to-end", ok, t0,
              f"[{'; '.join(detail)}; run {elapsed_run / 60:.1f}min < 15min]")


def test_robustness_monotonicity(robustness_store):
    t0 = time.time()
    root, store, elapsed_run = robustness_store
    d0, _ = _config_stats(store, "node2vec_balanced", rho=0.0)
    d5, _ = _config_stats(store, "node2vec_balanced", rho=0.5)
    drop = d0 - d5
    ok = drop >= 0.02 and elapsed_run < 45 * 60
    # robustness-trend report renders from the same store
    report(store, "robustness-trend", Path(root) / "out_robust" / "reports")
    _announce("robustness-monotonicity", ok, t0,
              f"[proximity dF1 {d0:+.3f} -> {d5:+.3f}, drop {drop:+.3f} "
              f">= 0.02; run {elapsed_run / 60:.1f}min < 45min]")


# --------------------------------------------------------------------------
# optional full-scale Elliptic reproduction
# --------------------------------------------------------------------------

ELLIPTIC_DIR = os.environ.get("SIGBENCH_ELLIPTIC_DIR", "")


@pytest.mark.skipif(not ELLIPTIC_DIR or not Path(ELLIPTIC_DIR).exists(),
                    reason="Elliptic dataset not present "
                           "(set SIGBENCH_ELLIPTIC_DIR)")
def test_elliptic_directional_reproduction(tmp_path):
    """Directional full-scale targets; hours of compute, opt-in only."""
    t0 = time.time()
    root = Path(ELLIPTIC_DIR)
    cfg = {
        "version": 1,
        "dataset": {"edges": str(root / "elliptic_txs_edgelist.csv"),
                    "features": str(root / "elliptic_txs_features.csv"),
                    "classes": str(root / "elliptic_txs_classes.csv"),
                    "base_columns": [0, 93]},
        "signals": [s for s in
                    ("degree", "pagerank", "betweenness", "eigenvector",
                     "closeness", "clustering", "core_number", "triangles",
                     "avg_neighbor_clustering", "louvain", "leiden", "infomap",
                     "deepwalk", "node2vec_bfs", "node2vec_dfs",
                     "node2vec_balanced", "spectral", "struct_layer",
                     "graphwave", "role2vec")],
        "classifiers": ["logreg", "gnb", "linear_svm", "random_forest",
                        "gbt", "mlp"],
        "hpo": {"seed": 42, "budget": 50},
        "eval_seeds": "1..10",
        "perturbation": {"levels": [0.0], "seed": 42},
        "output_dir": str(tmp_path / "elliptic_out"),
    }
    cfg_path = tmp_path / "elliptic.json"
    cfg_path.write_text(json.dumps(cfg))
    store = run_experiment(load_config(cfg_path))
    seeds = store.manifest["eval_seeds"]
    deltas = []
    n_better_total = 0
    n_worse_total = 0
    for classifier in cfg["classifiers"]:
        for config in cfg["signals"]:
            d, sig = _config_stats_filtered(store, classifier, config, seeds)
            deltas.append(d)
            n_better_total += sig.n_better
            n_worse_total += sig.n_worse
    frac_improved = np.mean([d > 0 for d in deltas])
    grand_mean = float(np.mean(deltas))
    ok = (frac_improved >= 0.70 and abs(grand_mean - 0.031) <= 0.02
          and n_better_total >= 3 * max(n_worse_total, 1))
    _announce("elliptic-directional", ok, t0,
              f"[{frac_improved:.1%} improved, grand mean {grand_mean:+.4f}, "
              f"sig {n_better_total}/{n_worse_total}]")


def _config_stats_filtered(store, classifier, config, seeds):
    aug, base, mres = {}, {}, {}
    for r in store.ok_records():
        if r.classifier != classifier or r.rho != 0.0:
            continue
        if r.config_name == config:
            aug[r.seed] = r.metrics["f1"]
            mres[r.seed] = McNemarResult(**r.mcnemar)
        elif r.config_name == "baseline":
            base[r.seed] = r.metrics["f1"]
    d = delta_f1(trimmed_mean([aug[s] for s in seeds]),
                 trimmed_mean([base[s] for s in seeds]))
    return d, significance_counts([mres[s] for s in seeds])
