"""Report generation: the delimited tables behind the paper-style views,
with a rendered matplotlib figure written alongside each table.

Kinds:
  category-delta      per-config trimmed-mean F1 gain over baseline,
                      averaged across classifiers
  matrix-mean-std     classifier x config cells "mean +/- std" (trimmed)
  significance-matrix classifier x config cells "#better / #worse"
  robustness-trend    per-config average delta F1 as a function of rho
  peak-per-category   best F1 per category with the baseline reference

Reports are pure functions of the result store; an incomplete store is an
error that lists the missing cells. Naive Bayes rows are kept in matrix
tables but excluded from aggregated views when the store was produced
with the NB-exclusion flag (the default).
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .stats import McNemarResult, significance_counts, trimmed_mean, trimmed_std
from .store import ResultStore

REPORT_KINDS = ("category-delta", "matrix-mean-std", "significance-matrix",
                "robustness-trend", "peak-per-category")


class IncompleteStoreError(RuntimeError):
    pass


def _check_complete(store: ResultStore):
    man = store.manifest
    classifiers = man["classifiers"]
    configs = [sc["name"] for sc in man["signal_configs"]]
    seeds = man["eval_seeds"]
    rhos = man["rho_levels"]
    missing, failed = store.completeness(classifiers, configs, seeds, rhos)
    if missing or failed:
        head = [f"missing {m}" for m in missing[:10]]
        head += [f"failed {f}" for f in failed[:10]]
        raise IncompleteStoreError(
            f"store incomplete: {len(missing)} missing, {len(failed)} failed "
            f"cells; first: " + "; ".join(head))
    return classifiers, configs, seeds, rhos


def _included_classifiers(store: ResultStore, classifiers):
    if store.manifest.get("exclude_nb", True):
        kept = [c for c in classifiers if c != "gnb"]
        return kept if kept else classifiers
    return classifiers


def _f1_by_cell(store: ResultStore):
    out = {}
    for r in store.ok_records():
        out.setdefault((r.classifier, r.config_name, r.rho), {})[r.seed] = \
            r.metrics["f1"]
    return out


def _trimmed(cell: dict, seeds) -> tuple:
    scores = [cell[s] for s in seeds]
    return trimmed_mean(scores), trimmed_std(scores)


def _config_categories(store: ResultStore) -> dict:
    return {sc["name"]: sc["category"]
            for sc in store.manifest["signal_configs"]}


def report(store: ResultStore, kind: str, out_dir, figures: bool = True):
    """Write ``<kind>.csv`` (and ``<kind>.png``) under ``out_dir``."""
    if kind not in REPORT_KINDS:
        raise ValueError(f"unknown report kind {kind!r}; "
                         f"expected one of {REPORT_KINDS}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    builder = {
        "category-delta": _category_delta,
        "matrix-mean-std": _matrix_mean_std,
        "significance-matrix": _significance_matrix,
        "robustness-trend": _robustness_trend,
        "peak-per-category": _peak_per_category,
    }[kind]
    rows, fig_fn = builder(store)
    csv_path = out_dir / f"{kind}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(row)
    if figures:
        fig_fn(out_dir / f"{kind}.png")
    return csv_path


def _category_delta(store: ResultStore):
    classifiers, configs, seeds, rhos = _check_complete(store)
    kept = _included_classifiers(store, classifiers)
    cells = _f1_by_cell(store)
    cats = _config_categories(store)
    rho = 0.0
    rows = [["config", "category", "n_classifiers", "delta_f1"]]
    deltas = {}
    for cfg_name in configs:
        ds = []
        for c in kept:
            aug, _ = _trimmed(cells[(c, cfg_name, rho)], seeds)
            base, _ = _trimmed(cells[(c, "baseline", rho)], seeds)
            ds.append(aug - base)
        deltas[cfg_name] = float(np.mean(ds))
        rows.append([cfg_name, cats[cfg_name], len(kept),
                     f"{deltas[cfg_name]:+.6f}"])

    def fig(path):
        f, ax = plt.subplots(figsize=(max(4, 1.1 * len(configs)), 4))
        names = list(deltas)
        vals = [deltas[n] for n in names]
        colors = ["#2e7d32" if v >= 0 else "#c62828" for v in vals]
        ax.bar(names, vals, color=colors)
        ax.axhline(0, color="k", lw=0.8)
        ax.set_ylabel("delta F1 vs baseline (trimmed)")
        ax.set_title("F1 gain per signal configuration")
        plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
        f.tight_layout()
        f.savefig(path, dpi=150)
        plt.close(f)

    return rows, fig


def _matrix_mean_std(store: ResultStore):
    classifiers, configs, seeds, rhos = _check_complete(store)
    cells = _f1_by_cell(store)
    rho = 0.0
    all_cfg = ["baseline", *configs]
    rows = [["classifier", "config", "f1_mean", "f1_std"]]
    M = np.zeros((len(classifiers), len(all_cfg)))
    S = np.zeros_like(M)
    for i, c in enumerate(classifiers):
        for j, cfg_name in enumerate(all_cfg):
            mean, std = _trimmed(cells[(c, cfg_name, rho)], seeds)
            M[i, j], S[i, j] = mean, std
            rows.append([c, cfg_name, f"{mean:.6f}", f"{std:.6f}"])

    def fig(path):
        f, ax = plt.subplots(figsize=(1.6 * len(all_cfg) + 2,
                                      0.75 * len(classifiers) + 2))
        rel = M - M[:, :1]
        im = ax.imshow(rel, cmap="RdYlGn", vmin=-np.abs(rel).max() - 1e-9,
                       vmax=np.abs(rel).max() + 1e-9)
        for i in range(len(classifiers)):
            for j in range(len(all_cfg)):
                ax.text(j, i, f"{M[i, j]:.3f}\n±{S[i, j]:.3f}",
                        ha="center", va="center", fontsize=8)
        ax.set_xticks(range(len(all_cfg)), all_cfg, rotation=30, ha="right")
        ax.set_yticks(range(len(classifiers)), classifiers)
        ax.set_title("trimmed mean F1 (color: gain vs baseline)")
        f.colorbar(im, ax=ax, shrink=0.8)
        f.tight_layout()
        f.savefig(path, dpi=150)
        plt.close(f)

    return rows, fig


def _mcnemar_results(store: ResultStore):
    out = {}
    for r in store.ok_records():
        if r.config_name == "baseline" or r.mcnemar is None:
            continue
        out.setdefault((r.classifier, r.config_name, r.rho), {})[r.seed] = \
            McNemarResult(**r.mcnemar)
    return out

def _significance_matrix(store: ResultStore):
    classifiers, configs, seeds, rhos = _check_complete(store)
    mres = _mcnemar_results(store)
    rho = 0.0
    rows = [["classifier", "config", "n_better", "n_worse", "n_seeds"]]
    B = np.zeros((len(classifiers), len(configs)), dtype=int)
    W = np.zeros_like(B)
    for i, c in enumerate(classifiers):
        for j, cfg_name in enumerate(configs):
            per_seed = mres[(c, cfg_name, rho)]
            summary = significance_counts([per_seed[s] for s in seeds])
            B[i, j], W[i, j] = summary.n_better, summary.n_worse
            rows.append([c, cfg_name, summary.n_better, summary.n_worse,
                         summary.n_seeds])

    def fig(path):
        f, ax = plt.subplots(figsize=(1.4 * len(configs) + 2,
                                      0.75 * len(classifiers) + 2))
        net = B - W
        lim = max(1, np.abs(net).max())
        im = ax.imshow(net, cmap="RdYlGn", vmin=-lim, vmax=lim)
        for i in range(len(classifiers)):
            for j in range(len(configs)):
                ax.text(j, i, f"{B[i, j]} / {W[i, j]}", ha="center",
                        va="center", fontsize=9)
        ax.set_xticks(range(len(configs)), configs, rotation=30, ha="right")
        ax.set_yticks(range(len(classifiers)), classifiers)
        ax.set_title("significant improvements / deteriorations "
                     f"(p <= 0.05, {len(seeds)} seeds)")
        f.colorbar(im, ax=ax, shrink=0.8)
        f.tight_layout()
        f.savefig(path, dpi=150)
        plt.close(f)

    return rows, fig


def _robustness_trend(store: ResultStore):
    classifiers, configs, seeds, rhos = _check_complete(store)
    kept = _included_classifiers(store, classifiers)
    cells = _f1_by_cell(store)
    cats = _config_categories(store)
    rows = [["config", "category", "rho", "delta_f1"]]
    trend = {cfg_name: [] for cfg_name in configs}
    for cfg_name in configs:
        for rho in rhos:
            ds = []
            for c in kept:
                aug, _ = _trimmed(cells[(c, cfg_name, rho)], seeds)
                base, _ = _trimmed(cells[(c, "baseline", rho)], seeds)
                ds.append(aug - base)
            val = float(np.mean(ds))
            trend[cfg_name].append((rho, val))
            rows.append([cfg_name, cats[cfg_name], f"{rho:g}", f"{val:+.6f}"])

    def fig(path):
        f, ax = plt.subplots(figsize=(6, 4))
        for cfg_name, pts in trend.items():
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            ax.plot(xs, ys, marker="o", label=cfg_name)
        ax.axhline(0, color="k", lw=0.8)
        ax.set_xlabel("edge removal fraction rho")
        ax.set_ylabel("delta F1 vs baseline (trimmed)")
        ax.set_title("robustness under edge removal")
        ax.legend(fontsize=8)
        f.tight_layout()
        f.savefig(path, dpi=150)
        plt.close(f)

    return rows, fig


def _peak_per_category(store: ResultStore):
    classifiers, configs, seeds, rhos = _check_complete(store)
    cells = _f1_by_cell(store)
    cats = _config_categories(store)
    rho = 0.0
    baseline_best = max(_trimmed(cells[(c, "baseline", rho)], seeds)[0]
                        for c in classifiers)
    peaks: dict = {}
    for cfg_name in configs:
        cat = cats[cfg_name]
        best = max(_trimmed(cells[(c, cfg_name, rho)], seeds)[0]
                   for c in classifiers)
        peaks[cat] = max(peaks.get(cat, -np.inf), best)
    rows = [["category", "max_f1", "baseline_best"]]
    for cat, val in peaks.items():
        rows.append([cat, f"{val:.6f}", f"{baseline_best:.6f}"])

    def fig(path):
        f, ax = plt.subplots(figsize=(max(4, 1.1 * len(peaks)), 4))
        names = list(peaks)
        ax.bar(names, [peaks[n] for n in names], color="#1565c0")
        ax.axhline(baseline_best, color="k", ls="--", lw=1.2,
                   label="best baseline")
        ax.set_ylabel("max trimmed F1")
        ax.set_title("peak F1 per signal category")
        ax.legend()
        plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
        f.tight_layout()
        f.savefig(path, dpi=150)
        plt.close(f)

    return rows, fig


def significance_table(store: ResultStore):
    """Per-(classifier, config, rho) significance counts as rows."""
    classifiers, configs, seeds, rhos = _check_complete(store)
    mres = _mcnemar_results(store)
    rows = [["classifier", "config", "rho", "n_better", "n_worse", "n_seeds"]]
    for c in classifiers:
        for cfg_name in configs:
            for rho in rhos:
                s = significance_counts(
                    [mres[(c, cfg_name, rho)][sd] for sd in seeds])
                rows.append([c, cfg_name, f"{rho:g}", s.n_better, s.n_worse,
                             s.n_seeds])
    return rows
