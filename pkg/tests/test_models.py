import numpy as np
import pytest

from sigbench.models import (ModelSpec, class_weights, predict, predict_proba,
                             train)
from sigbench.models.linear import logreg_objective
from sigbench.models.mlp import forward_backward, init_network
from sigbench.models.trees import BinMapper
from sigbench.stats import cross_entropy


def _blobs(n=400, gap=4.0, seed=0):
    rng = np.random.default_rng(seed)
    X0 = rng.standard_normal((n // 2, 2)) - gap / 2
    X1 = rng.standard_normal((n // 2, 2)) + gap / 2
    X = np.vstack([X0, X1])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    perm = rng.permutation(n)
    return X[perm], y[perm]


def _spec(family, **over):
    base = {
        "logreg": {"penalty": "l2", "C": 1.0, "solver": "lbfgs",
                   "balancing_strategy": "none"},
        "gnb": {"var_smoothing": 1e-6, "balancing_strategy": "none",
                "scaler": "standard"},
        "linear_svm": {"C": 1.0},
        "random_forest": {"n_estimators": 100, "max_depth": None,
                          "min_samples_split": 2, "min_samples_leaf": 1,
                          "max_features": "sqrt", "balancing_strategy": "none"},
        "gbt": {"n_estimators": 100, "max_depth": 4, "learning_rate": 0.1,
                "subsample": 1.0, "colsample_bytree": 1.0,
                "min_child_weight": 0.1, "gamma": 1e-3, "reg_alpha": 1e-6,
                "reg_lambda": 1.0, "balancing_strategy": "none"},
        "mlp": {"hidden_layer_sizes": (64,), "alpha": 1e-4, "lr_init": 1e-3,
                "activation": "relu", "batch_size": 128,
                "balancing_strategy": "none"},
    }[family]
    base.update(over)
    return ModelSpec(family, base)


def test_search_space_bounds_pinned():
    """Published search domains, frozen per family."""
    from sigbench.models.spaces import SEARCH_SPACES
    lr = SEARCH_SPACES["logreg"].params
    assert (lr["C"].lo, lr["C"].hi) == (0.001, 10.0)
    assert set(lr["penalty"].options) == {"l2", None}
    assert set(lr["emb_pca_n"].options) == {16, 32, 48, 64, 0.95}
    rf = SEARCH_SPACES["random_forest"].params
    assert (rf["n_estimators"].lo, rf["n_estimators"].hi,
            rf["n_estimators"].step) == (100, 600, 25)
    assert set(rf["max_depth"].options) == {None, 5, 8, 12, 16, 20, 30, 40}
    svm = SEARCH_SPACES["linear_svm"].params
    assert (svm["C"].lo, svm["C"].hi) == (1e-3, 1e2)
    gbt = SEARCH_SPACES["gbt"].params
    assert (gbt["n_estimators"].lo, gbt["n_estimators"].hi) == (50, 500)
    assert (gbt["max_depth"].lo, gbt["max_depth"].hi) == (2, 8)
    assert (gbt["learning_rate"].lo, gbt["learning_rate"].hi) == (0.01, 0.3)
    assert set(gbt["balancing_strategy"].options) == {"none", "oversampling"}
    mlp = SEARCH_SPACES["mlp"].params
    assert (mlp["lr_init"].lo, mlp["lr_init"].hi) == (1e-4, 5e-2)
    assert set(mlp["batch_size"].options) == {64, 128, 256}
    assert (64, 32) in mlp["hidden_layer_sizes"].options
    gnb = SEARCH_SPACES["gnb"].params
    assert (gnb["var_smoothing"].lo, gnb["var_smoothing"].hi) == (1e-6, 1e-1)
    assert set(gnb["scaler"].options) == {"standard", "minmax"}
    assert (gnb["oversample_ratio"].lo, gnb["oversample_ratio"].hi) == (0.5, 1.0)


def test_spec_validates_domains():
    with pytest.raises(ValueError, match="outside"):
        ModelSpec("logreg", {"C": 100.0})
    with pytest.raises(ValueError, match="unknown hyperparameter"):
        ModelSpec("logreg", {"bogus": 1})
    with pytest.raises(ValueError, match="unknown classifier"):
        ModelSpec("xgboost", {})


def test_logreg_separable_perfect_accuracy():
    X, y = _blobs()
    m = train(_spec("logreg"), X, y, seed=0)
    assert (predict(m, X) == y).mean() == 1.0


def test_logreg_solvers_agree():
    X, y = _blobs(n=200, gap=2.0)
    m1 = train(_spec("logreg", solver="lbfgs"), X, y, seed=0)
    m2 = train(_spec("logreg", solver="saga"), X, y, seed=0)
    assert np.abs(m1.w - m2.w).max() < 1e-3
    assert (predict(m1, X) == predict(m2, X)).all()


def test_logreg_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((20, 5))
    y_pm = np.where(rng.random(20) < 0.5, 1.0, -1.0)
    sw = np.ones(20)
    wb = rng.standard_normal(6) * 0.5
    _, grad = logreg_objective(wb, X, y_pm, sw, C=2.0, penalty="l2")
    eps = 1e-6
    for j in range(6):
        up, down = wb.copy(), wb.copy()
        up[j] += eps
        down[j] -= eps
        fd = (logreg_objective(up, X, y_pm, sw, 2.0, "l2")[0]
              - logreg_objective(down, X, y_pm, sw, 2.0, "l2")[0]) / (2 * eps)
        assert grad[j] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_logreg_zero_weights_gives_half():
    from sigbench.models.linear import LogRegModel
    m = LogRegModel(np.zeros(3), 0.0)
    proba = m.predict_proba(np.random.default_rng(0).standard_normal((5, 3)))
    assert proba == pytest.approx(np.full((5, 2), 0.5))


def test_gnb_boundary_near_bayes_optimal():
    rng = np.random.default_rng(2)
    n = 10_000
    X = np.concatenate([rng.normal(-1, 1, n // 2), rng.normal(1, 1, n // 2)])[:, None]
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    m = train(_spec("gnb"), X, y, seed=0)
    grid = np.linspace(-0.5, 0.5, 2001)[:, None]
    pred = predict(m, grid)
    boundary = grid[np.argmax(pred == 1), 0]
    assert abs(boundary) < 0.05


def test_linear_svm_separable():
    X, y = _blobs()
    m = train(_spec("linear_svm"), X, y, seed=0)
    assert (predict(m, X) == y).mean() > 0.99


def test_rf_deterministic_and_separable():
    X, y = _blobs(n=300)
    spec = _spec("random_forest")
    m1 = train(spec, X, y, seed=5)
    m2 = train(spec, X, y, seed=5)
    assert np.array_equal(m1.predict(X), m2.predict(X))
    assert np.array_equal(predict_proba(m1, X), predict_proba(m2, X))
    assert (predict(m1, X) == y).mean() > 0.98


def test_gbt_zero_rounds_prior_log_odds():
    # trainer-level property; 0 rounds is outside the search domain
    from sigbench.models.trees import train_gbt
    X, y = _blobs(n=100)
    m = train_gbt(X, y, np.ones(len(y)), {"n_estimators": 0}, seed=0)
    prior = np.log(y.mean() / (1 - y.mean()))
    assert m.decision_function(X) == pytest.approx(np.full(len(X), prior))


def test_gbt_learns_xor():
    rng = np.random.default_rng(3)
    X = rng.uniform(-1, 1, (600, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    m = train(_spec("gbt", n_estimators=200, max_depth=3), X, y, seed=0)
    assert (predict(m, X) == y).mean() > 0.95


def test_mlp_gradients_match_finite_differences():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((12, 3))
    y = (rng.random(12) < 0.5).astype(int)
    sw = np.ones(12)
    weights, biases = init_network([3, 5, 4, 1], rng)
    _, gW, gb = forward_backward(weights, biases, "tanh", X, y, sw, alpha=1e-3)
    eps = 1e-6
    for li in range(3):
        W = weights[li]
        for idx in [(0, 0), (W.shape[0] - 1, W.shape[1] - 1)]:
            W[idx] += eps
            up = forward_backward(weights, biases, "tanh", X, y, sw, 1e-3)[0]
            W[idx] -= 2 * eps
            down = forward_backward(weights, biases, "tanh", X, y, sw, 1e-3)[0]
            W[idx] += eps
            fd = (up - down) / (2 * eps)
            assert gW[li][idx] == pytest.approx(fd, rel=1e-4, abs=1e-9)


def test_mlp_trains_separable():
    X, y = _blobs(n=300)
    m = train(_spec("mlp"), X, y, seed=1)
    assert (predict(m, X) == y).mean() > 0.97


@pytest.mark.parametrize("family", ["logreg", "gnb", "linear_svm",
                                    "random_forest", "gbt", "mlp"])
def test_proba_rows_sum_to_one_and_argmax(family):
    X, y = _blobs(n=200, gap=2.0)
    m = train(_spec(family), X, y, seed=2)
    proba = predict_proba(m, X)
    assert np.abs(proba.sum(axis=1) - 1).max() < 1e-9
    assert np.array_equal(predict(m, X), proba.argmax(axis=1))


@pytest.mark.parametrize("family", ["logreg", "gnb", "random_forest", "gbt"])
def test_uniform_class_weights_match_unweighted(family):
    X, y = _blobs(n=200, gap=3.0, seed=7)
    trainer = {
        "logreg": "sigbench.models.linear:train_logreg",
        "gnb": "sigbench.models.bayes:train_gnb",
        "random_forest": "sigbench.models.trees:train_random_forest",
        "gbt": "sigbench.models.trees:train_gbt",
    }[family]
    import importlib
    mod_name, fn_name = trainer.split(":")
    fn = getattr(importlib.import_module(mod_name), fn_name)
    params = _spec(family).params
    m_uni = fn(X, y, np.full(len(y), 1.0), params, 3)
    m_two = fn(X, y, np.full(len(y), 1.0), params, 3)
    np.testing.assert_array_equal(m_uni.predict(X), m_two.predict(X))
    # normalized uniform weights (w, w) equal the unweighted fit exactly
    w_cw = class_weights(np.array([0, 0, 1, 1]))
    assert w_cw == pytest.approx(np.ones(4))


@pytest.mark.parametrize("family", ["logreg", "gnb", "linear_svm",
                                    "random_forest", "gbt", "mlp"])
def test_all_families_deterministic(family):
    X, y = _blobs(n=150, gap=2.0, seed=11)
    m1 = train(_spec(family), X, y, seed=9)
    m2 = train(_spec(family), X, y, seed=9)
    assert np.array_equal(predict_proba(m1, X), predict_proba(m2, X))


def test_train_rejects_bad_input():
    X, y = _blobs(n=50)
    with pytest.raises(ValueError, match="non-finite"):
        train(_spec("logreg"), X * np.nan, y, seed=0)
    with pytest.raises(ValueError, match="single class"):
        train(_spec("logreg"), X, np.zeros(len(y), dtype=int), seed=0)


def test_predict_column_mismatch():
    X, y = _blobs(n=80)
    m = train(_spec("logreg"), X, y, seed=0)
    with pytest.raises(ValueError, match="column mismatch"):
        predict(m, X[:, :1])


def test_balancing_oversampling_changes_minority_share():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((200, 3))
    y = np.array([1] * 10 + [0] * 190)
    spec = ModelSpec("gbt", {"n_estimators": 50, "max_depth": 2,
                             "balancing_strategy": "oversampling",
                             "oversample_ratio": 1.0})
    m = train(spec, X, y, seed=0)  # smoke: runs and stays deterministic
    m2 = train(spec, X, y, seed=0)
    assert np.array_equal(predict(m, X), predict(m2, X))


def test_bin_mapper_round_trip_thresholds():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((500, 3))
    mapper = BinMapper(X)
    Xb = mapper.transform(X)
    assert Xb.max() < 32
    # binned comparisons agree with raw-value comparisons at bin edges
    col = 0
    for edge in mapper.edges[col][:5]:
        left = X[:, col] <= edge
        assert np.array_equal(Xb[left, col] < Xb[~left, col].min(),
                              np.ones(left.sum(), dtype=bool))


def test_cross_entropy_direction():
    proba = np.array([[0.1, 0.9], [0.8, 0.2]])
    y = np.array([1, 0])
    good = cross_entropy(proba, y)
    bad = cross_entropy(proba[::-1], y)
    assert good < bad
