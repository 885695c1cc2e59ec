"""Append-only result store: JSON-lines records plus a manifest.

One record per (classifier, signal config, seed, rho). Records never
change once written; reruns with an identical configuration reproduce the
store byte-for-byte except for the documented timing fields
(``wall_clock`` in records, ``created_at`` in the manifest).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

TIMING_KEYS = ("wall_clock", "created_at")


@dataclass
class RunRecord:
    classifier: str
    config_name: str            # "baseline" or a signal-config name
    signals: list
    category: str
    seed: int
    rho: float
    status: str = "ok"          # ok | failed
    reason: str = ""
    metrics: dict | None = None
    mcnemar: dict | None = None
    spec_digest: str = ""
    split_digest: str = ""
    reproducible: bool = True
    wall_clock: float = 0.0

    def as_dict(self) -> dict:
        return {
            "classifier": self.classifier, "config": self.config_name,
            "signals": list(self.signals), "category": self.category,
            "seed": self.seed, "rho": self.rho, "status": self.status,
            "reason": self.reason, "metrics": self.metrics,
            "mcnemar": self.mcnemar, "spec_digest": self.spec_digest,
            "split_digest": self.split_digest,
            "reproducible": self.reproducible, "wall_clock": self.wall_clock,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(classifier=d["classifier"], config_name=d["config"],
                   signals=d["signals"], category=d["category"],
                   seed=d["seed"], rho=d["rho"], status=d["status"],
                   reason=d.get("reason", ""), metrics=d.get("metrics"),
                   mcnemar=d.get("mcnemar"), spec_digest=d.get("spec_digest", ""),
                   split_digest=d.get("split_digest", ""),
                   reproducible=d.get("reproducible", True),
                   wall_clock=d.get("wall_clock", 0.0))


class ResultStore:
    """Record log under ``<dir>/records.jsonl`` with ``manifest.json``."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.records: list = []
        self.manifest: dict = {}

    @property
    def records_path(self) -> Path:
        return self.directory / "records.jsonl"

    @property
    def manifest_path(self) -> Path:
        return self.directory / "manifest.json"

    @classmethod
    def create(cls, directory, manifest: dict) -> "ResultStore":
        store = cls(directory)
        store.directory.mkdir(parents=True, exist_ok=True)
        store.manifest = manifest
        with open(store.manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        store.records_path.write_text("")
        return store

    @classmethod
    def load(cls, directory) -> "ResultStore":
        store = cls(directory)
        if store.manifest_path.exists():
            store.manifest = json.loads(store.manifest_path.read_text())
        with open(store.records_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    store.records.append(RunRecord.from_dict(json.loads(line)))
        return store

    def append(self, record: RunRecord) -> None:
        self.records.append(record)
        with open(self.records_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record.as_dict(), sort_keys=True))
            fh.write("\n")

    # -- queries -------------------------------------------------------------

    def ok_records(self):
        return [r for r in self.records if r.status == "ok"]

    def cell_index(self) -> dict:
        return {(r.classifier, r.config_name, r.seed, r.rho): r
                for r in self.records}

    def completeness(self, classifiers, config_names, seeds, rhos):
        """Missing or failed cells against the full protocol grid."""
        idx = self.cell_index()
        missing, failed = [], []
        for c in classifiers:
            for cfg in ["baseline", *config_names]:
                for s in seeds:
                    for rho in rhos:
                        r = idx.get((c, cfg, s, rho))
                        if r is None:
                            missing.append((c, cfg, s, rho))
                        elif r.status != "ok":
                            failed.append((c, cfg, s, rho))
        return missing, failed


def strip_timing(obj):
    """Deep-copy a JSON-like object with timing fields removed (for
    byte-identity comparisons between reruns)."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def canonical_store_bytes(directory) -> bytes:
    """Store content with timing fields stripped, for determinism checks."""
    store_dir = Path(directory)
    records = []
    with open(store_dir / "records.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(strip_timing(json.loads(line)))
    manifest = strip_timing(json.loads((store_dir / "manifest.json").read_text()))
    return json.dumps({"manifest": manifest, "records": records},
                      sort_keys=True).encode()
