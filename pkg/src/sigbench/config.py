"""Experiment configuration: documented JSON schema, version 1.

Minimal example::

    {
      "version": 1,
      "dataset": {"edges": "edges.csv", "features": "features.csv",
                  "classes": "classes.csv", "base_columns": [0, 93]},
      "signals": ["pagerank", "louvain", "category:Centrality"],
      "classifiers": ["random_forest", "logreg"],
      "hpo": {"seed": 42, "budget": 50},
      "eval_seeds": "1..10",
      "perturbation": {"levels": [0.0], "seed": 42},
      "report": {"exclude_nb": true},
      "embedding_dir": null,
      "output_dir": "out"
    }

Signal entries are registry names, ``category:<Family>`` bundles
(concatenating every signal of that family), or ``{"name": ..., "signals":
[...]}`` custom groups. The config digest covers every semantic field but
not file locations, so runs into different directories stay comparable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .models.spaces import FAMILIES
from .signals.registry import CATEGORY_MEMBERS, REGISTRY, signal_category

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class SignalConfig:
    """One augmented configuration: a named list of registry signals."""

    name: str
    signals: list
    category: str

    def as_dict(self) -> dict:
        return {"name": self.name, "signals": list(self.signals),
                "category": self.category}


@dataclass
class ExperimentConfig:
    dataset: dict
    signal_configs: list
    classifiers: list
    hpo_seed: int = 42
    hpo_budget: int = 50
    eval_seeds: tuple = tuple(range(1, 11))
    rho_levels: tuple = (0.0,)
    perturbation_seed: int = 42
    exclude_nb: bool = True
    embedding_dir: str | None = None
    output_dir: str = "out"

    def __post_init__(self):
        if not self.eval_seeds or len(set(self.eval_seeds)) != len(self.eval_seeds):
            raise ConfigError("eval seeds must be non-empty and distinct")
        for rho in self.rho_levels:
            if not 0.0 <= rho <= 1.0:
                raise ConfigError(f"perturbation level {rho} outside [0,1]")
        if 0.0 not in self.rho_levels:
            raise ConfigError("perturbation levels must include 0 (HPO anchor)")
        for c in self.classifiers:
            if c not in FAMILIES:
                raise ConfigError(f"unknown classifier {c!r}")
        seen = set()
        for sc in self.signal_configs:
            if sc.name in seen or sc.name == "baseline":
                raise ConfigError(f"duplicate or reserved config name {sc.name!r}")
            seen.add(sc.name)
            for s in sc.signals:
                if s not in REGISTRY:
                    raise ConfigError(f"unknown signal {s!r} in config {sc.name!r}")

    def digest(self) -> str:
        payload = {
            "version": CONFIG_VERSION,
            "dataset": _dataset_digests(self.dataset),
            "signals": [sc.as_dict() for sc in self.signal_configs],
            "classifiers": list(self.classifiers),
            "hpo": {"seed": self.hpo_seed, "budget": self.hpo_budget},
            "eval_seeds": list(self.eval_seeds),
            "perturbation": {"levels": list(self.rho_levels),
                             "seed": self.perturbation_seed},
            "report": {"exclude_nb": self.exclude_nb},
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _dataset_digests(dataset: dict) -> dict:
    out = {}
    for key in ("edges", "features", "classes"):
        path = Path(dataset[key])
        h = hashlib.sha256()
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
        out[key] = h.hexdigest()
    if dataset.get("base_columns") is not None:
        out["base_columns"] = list(dataset["base_columns"])
    return out


def expand_signal_entry(entry) -> SignalConfig:
    """Resolve one config entry into a named signal group."""
    if isinstance(entry, dict):
        name = entry["name"]
        signals = list(entry["signals"])
        cats = {signal_category(s) for s in signals if s in REGISTRY}
        category = cats.pop() if len(cats) == 1 else "Mixed"
        return SignalConfig(name, signals, category)
    if isinstance(entry, str) and entry.startswith("category:"):
        cat = entry.split(":", 1)[1]
        if cat not in CATEGORY_MEMBERS:
            raise ConfigError(f"unknown category {cat!r}")
        return SignalConfig(cat, list(CATEGORY_MEMBERS[cat]), cat)
    if isinstance(entry, str):
        if entry not in REGISTRY:
            raise ConfigError(f"unknown signal {entry!r}")
        return SignalConfig(entry, [entry], signal_category(entry))
    raise ConfigError(f"bad signal entry: {entry!r}")


def parse_seeds(spec) -> tuple:
    """Seeds as a list, or the "a..b" inclusive-range shorthand."""
    if isinstance(spec, str):
        lo, hi = spec.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(s) for s in spec)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if raw.get("version") != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {raw.get('version')!r}")
    base = path.parent

    def resolve(p):
        p = Path(p)
        return str(p if p.is_absolute() else base / p)

    dataset = dict(raw["dataset"])
    for key in ("edges", "features", "classes"):
        dataset[key] = resolve(dataset[key])
    hpo = raw.get("hpo", {})
    pert = raw.get("perturbation", {})
    report = raw.get("report", {})
    return ExperimentConfig(
        dataset=dataset,
        signal_configs=[expand_signal_entry(e) for e in raw.get("signals", [])],
        classifiers=list(raw.get("classifiers", [])),
        hpo_seed=int(hpo.get("seed", 42)),
        hpo_budget=int(hpo.get("budget", 50)),
        eval_seeds=parse_seeds(raw.get("eval_seeds", "1..10")),
        rho_levels=tuple(float(r) for r in pert.get("levels", [0.0])),
        perturbation_seed=int(pert.get("seed", 42)),
        exclude_nb=bool(report.get("exclude_nb", True)),
        embedding_dir=(resolve(raw["embedding_dir"])
                       if raw.get("embedding_dir") else None),
        output_dir=resolve(raw.get("output_dir", "out")),
    )
