import numpy as np
import pytest

from sigbench.models.spaces import (SearchSpace, choice, loguniform, quniform,
                                    uniform)
from sigbench.models.tpe import Trial, hpo_search


def _quadratic_space():
    return SearchSpace("toy", {"x": uniform(-5.0, 5.0)})


def test_budget_exactly_consumed():
    calls = []

    def obj(params):
        calls.append(params)
        return params["x"] ** 2

    hpo_search(_quadratic_space(), obj, budget=50, seed=42)
    assert len(calls) == 50


def test_fixed_seed_reproduces_trial_sequence():
    def obj(params):
        return params["x"] ** 2

    best1, trials1 = hpo_search(_quadratic_space(), obj, budget=30, seed=42)
    best2, trials2 = hpo_search(_quadratic_space(), obj, budget=30, seed=42)
    assert best1 == best2
    assert [t.params for t in trials1] == [t.params for t in trials2]


def test_failed_trials_recorded_and_search_continues():
    def obj(params):
        if params["x"] > 0:
            raise RuntimeError("boom")
        return params["x"] ** 2

    best, trials = hpo_search(_quadratic_space(), obj, budget=40, seed=1)
    assert len(trials) == 40
    failed = [t for t in trials if t.status == "failed"]
    assert failed and all(np.isinf(t.loss) for t in failed)
    assert best["x"] <= 0


def test_quadratic_concentration_vs_random():
    """TPE should localize the quadratic optimum at least as well as random."""
    tpe_best, rnd_best, tpe_hits = [], [], 0
    for rep in range(100):
        def obj(params):
            return params["x"] ** 2

        best, trials = hpo_search(_quadratic_space(), obj, budget=50,
                                  seed=1000 + rep)
        tpe_best.append(best["x"] ** 2)
        if abs(best["x"]) < 0.5:
            tpe_hits += 1
        rng = np.random.default_rng(5000 + rep)
        xs = rng.uniform(-5, 5, size=50)
        rnd_best.append((xs ** 2).min())
    assert tpe_hits >= 95
    assert np.median(tpe_best) <= np.median(rnd_best)


def test_choice_and_quantized_params_respect_domains():
    space = SearchSpace("mix", {
        "c": choice("a", "b", None),
        "q": quniform(100, 600, 25),
        "lg": loguniform(1e-3, 10.0),
    })

    def obj(params):
        assert params["c"] in ("a", "b", None)
        assert params["q"] % 25 == 0 and 100 <= params["q"] <= 600
        assert 1e-3 <= params["lg"] <= 10.0
        return (0.0 if params["c"] == "a" else 1.0) + params["q"] / 600

    best, trials = hpo_search(space, obj, budget=60, seed=3)
    assert best["c"] == "a"
    assert best["q"] <= 150


def test_tpe_prefers_good_region_in_proposals():
    # after startup, proposals should concentrate where losses are low
    def obj(params):
        return abs(params["x"] - 2.0)

    _, trials = hpo_search(_quadratic_space(), obj, budget=60, seed=11)
    tail = [t.params["x"] for t in trials[30:]]
    assert np.median(np.abs(np.array(tail) - 2.0)) < 1.5


def test_trial_serialization():
    t = Trial(3, {"x": 1.5, "h": (64, 32)}, 0.25)
    d = t.as_dict()
    assert d["params"]["h"] == [64, 32]
    assert d["loss"] == 0.25
    t_fail = Trial(4, {"x": 1.0}, float("inf"), status="failed", error="boom")
    assert t_fail.as_dict()["loss"] is None
