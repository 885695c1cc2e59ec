"""Tree-structured Parzen estimator hyperparameter search.

Sequential model-based optimization: 20 seeded random startup trials, then
proposals that split the observed history at the gamma = 0.25 loss
quantile, model every parameter with good/bad Parzen (kernel-density)
estimators, and evaluate the candidate with the best good/bad density
ratio among 24 samples drawn from the good model. Failed objectives score
+inf and the search continues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spaces import Param, SearchSpace

N_STARTUP = 20
GAMMA = 0.25
N_CANDIDATES = 24


@dataclass
class Trial:
    number: int
    params: dict
    loss: float
    status: str = "ok"
    error: str = ""

    def as_dict(self) -> dict:
        return {"number": self.number, "params": _jsonable(self.params),
                "loss": self.loss if math.isfinite(self.loss) else None,
                "status": self.status, "error": self.error}


def _jsonable(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, tuple):
            out[k] = list(v)
        elif isinstance(v, (np.integer,)):
            out[k] = int(v)
        elif isinstance(v, (np.floating,)):
            out[k] = float(v)
        else:
            out[k] = v
    return out


def _transform(p: Param, x: float) -> float:
    return math.log(x) if p.kind == "loguniform" else float(x)


def _bounds(p: Param) -> tuple[float, float]:
    if p.kind == "loguniform":
        return math.log(p.lo), math.log(p.hi)
    return float(p.lo), float(p.hi)


def _from_coord(p: Param, t: float):
    lo, hi = _bounds(p)
    t = min(max(t, lo), hi)
    x = math.exp(t) if p.kind == "loguniform" else t
    if p.kind == "quniform":
        x = round(x / p.step) * p.step
        x = min(max(x, p.lo), p.hi)
        if float(p.step).is_integer() and float(p.lo).is_integer():
            x = int(round(x))
    return x


def _sample_prior(p: Param, rng: np.random.Generator):
    if p.kind == "choice":
        return p.options[rng.integers(len(p.options))]
    lo, hi = _bounds(p)
    return _from_coord(p, rng.uniform(lo, hi))


class _ParzenContinuous:
    """Gaussian mixture over observed coordinates plus a uniform prior slot."""

    def __init__(self, p: Param, values, rng):
        self.lo, self.hi = _bounds(p)
        self.range = max(self.hi - self.lo, 1e-12)
        pts = np.sort(np.array([_transform(p, v) for v in values]))
        if len(pts):
            padded = np.concatenate([[self.lo], pts, [self.hi]])
            sig = np.maximum(padded[1:-1] - padded[:-2], padded[2:] - padded[1:-1])
            # bandwidth floor shrinks with the observation count so small
            # good-sets stay explorative instead of inching along clusters
            sig_min = self.range / min(100.0, 1.0 + len(pts))
            sig = np.clip(sig, sig_min, self.range)
        else:
            sig = np.empty(0)
        self.mu = pts
        self.sigma = sig
        self.rng = rng

    def sample(self) -> float:
        k = len(self.mu)
        pick = self.rng.integers(k + 1)
        if pick == k:  # uniform prior component
            return float(self.rng.uniform(self.lo, self.hi))
        for _ in range(10):
            x = self.rng.normal(self.mu[pick], self.sigma[pick])
            if self.lo <= x <= self.hi:
                return float(x)
        return float(np.clip(self.rng.normal(self.mu[pick], self.sigma[pick]),
                             self.lo, self.hi))

    def log_pdf(self, x: float) -> float:
        comps = [1.0 / self.range]  # uniform prior slot
        for mu, sig in zip(self.mu, self.sigma):
            z = (x - mu) / sig
            norm = 0.5 * (math.erf((self.hi - mu) / (sig * math.sqrt(2)))
                          - math.erf((self.lo - mu) / (sig * math.sqrt(2))))
            norm = max(norm, 1e-12)
            comps.append(math.exp(-0.5 * z * z) / (sig * math.sqrt(2 * math.pi)) / norm)
        return math.log(sum(comps) / (len(self.mu) + 1))


class _ParzenChoice:
    def __init__(self, p: Param, values, rng):
        self.options = p.options
        counts = np.ones(len(p.options))
        for v in values:
            for i, o in enumerate(p.options):
                if v == o or v is o:
                    counts[i] += 1
                    break
        self.probs = counts / counts.sum()
        self.rng = rng

    def sample(self):
        return self.options[self.rng.choice(len(self.options), p=self.probs)]

    def log_pdf(self, x) -> float:
        for i, o in enumerate(self.options):
            if x == o or x is o:
                return math.log(self.probs[i])
        return -math.inf


def _make_estimator(p: Param, values, rng):
    if p.kind == "choice":
        return _ParzenChoice(p, values, rng)
    return _ParzenContinuous(p, values, rng)


def _propose(space: SearchSpace, trials, rng, gamma=GAMMA,
             n_candidates=N_CANDIDATES) -> dict:
    losses = np.array([t.loss for t in trials])
    order = np.argsort(losses, kind="stable")
    n_good = max(1, int(np.ceil(gamma * len(trials))))
    good = [trials[i] for i in order[:n_good]]
    bad = [trials[i] for i in order[n_good:]]
    proposal, best_score = None, -math.inf
    models = {}
    for name, p in space.params.items():
        g = _make_estimator(p, [t.params[name] for t in good if name in t.params], rng)
        b = _make_estimator(p, [t.params[name] for t in bad if name in t.params], rng)
        models[name] = (p, g, b)
    for _ in range(n_candidates):
        cand = {}
        score = 0.0
        for name, (p, g, b) in models.items():
            raw = g.sample()
            value = _from_coord(p, raw) if p.kind != "choice" else raw
            coord = _transform(p, value) if p.kind != "choice" else value
            cand[name] = value
            score += g.log_pdf(coord) - b.log_pdf(coord)
        if score > best_score:
            proposal, best_score = cand, score
    return proposal


def hpo_search(space: SearchSpace, objective, budget: int = 50,
               seed: int = 42, n_startup: int = N_STARTUP):
    """Run the TPE loop; returns (best_params, trials).

    ``objective(params) -> loss`` is called exactly ``budget`` times; an
    objective exception marks that trial failed with +inf loss and the
    search continues.
    """
    rng = np.random.default_rng(seed)
    trials: list[Trial] = []
    for t in range(budget):
        finite = [tr for tr in trials if math.isfinite(tr.loss)]
        if t < n_startup or len(finite) < 2:
            params = {name: _sample_prior(p, rng) for name, p in space.params.items()}
        else:
            params = _propose(space, trials, rng)
        space.validate(params)
        try:
            loss = float(objective(params))
            trials.append(Trial(t, params, loss))
        except Exception as exc:  # noqa: BLE001 - failed trials are recorded
            trials.append(Trial(t, params, math.inf, status="failed", error=str(exc)))
    ok = [tr for tr in trials if math.isfinite(tr.loss)]
    if not ok:
        raise RuntimeError("every HPO trial failed")
    best = min(ok, key=lambda tr: (tr.loss, tr.number))
    return best.params, trials
