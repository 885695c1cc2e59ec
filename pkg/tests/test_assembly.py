import numpy as np
import pytest

from sigbench.assembly import (FeatureTable, LabelVector, TableFormatError,
                               apply_scaler, concat_signals, fit_scaler,
                               load_node_table, load_split, oversample,
                               pca_reduce, save_split, stratified_split)
from sigbench.signals import NodeSignal

from leakage import AccessTracker


def _write_dataset(tmp_path, n=30, d=5, unlabeled_every=4):
    rng = np.random.default_rng(0)
    ids = [str(1000 + i) for i in range(n)]
    feat_lines = []
    cls_lines = ["txId,class"]
    for i, nid in enumerate(ids):
        vals = rng.standard_normal(d)
        feat_lines.append(nid + "," + ",".join(f"{v:.6f}" for v in vals))
        if i % unlabeled_every == 0:
            cls_lines.append(f"{nid},unknown")
        elif i % 7 == 0:
            cls_lines.append(f"{nid},1")
        else:
            cls_lines.append(f"{nid},2")
    fpath = tmp_path / "features.csv"
    cpath = tmp_path / "classes.csv"
    fpath.write_text("\n".join(feat_lines) + "\n")
    cpath.write_text("\n".join(cls_lines) + "\n")
    return fpath, cpath, ids


def test_load_node_table(tmp_path):
    fpath, cpath, ids = _write_dataset(tmp_path)
    table, labels = load_node_table(fpath, cpath)
    assert table.n_rows == 30
    assert table.n_cols == 5
    assert table.ids == ids
    assert set(np.unique(labels.labels)) == {-1, 0, 1}


def test_load_node_table_column_range(tmp_path):
    fpath, cpath, _ = _write_dataset(tmp_path, d=8)
    table, _ = load_node_table(fpath, cpath, base_column_range=(0, 3))
    assert table.n_cols == 3
    with pytest.raises(TableFormatError, match="exceeds"):
        load_node_table(fpath, cpath, base_column_range=(0, 20))


def test_load_node_table_id_mismatch(tmp_path):
    fpath, cpath, _ = _write_dataset(tmp_path)
    cpath.write_text("txId,class\n999999,1\n")
    with pytest.raises(TableFormatError, match="no feature row"):
        load_node_table(fpath, cpath)


def test_load_node_table_non_numeric(tmp_path):
    fpath = tmp_path / "features.csv"
    cpath = tmp_path / "classes.csv"
    fpath.write_text("1,0.5,bad\n")
    cpath.write_text("txId,class\n1,1\n")
    with pytest.raises(TableFormatError, match="features.csv:1"):
        load_node_table(fpath, cpath)


def _table(n=10, d=3):
    rng = np.random.default_rng(1)
    return FeatureTable([str(i) for i in range(n)], rng.standard_normal((n, d)),
                        [f"base_{j:03d}" for j in range(d)], ["base"] * d)


def _signal(name, n=10, k=1):
    rng = np.random.default_rng(hash(name) % 2**32)
    return NodeSignal(name, "Centrality", [f"c{i}" for i in range(k)],
                      rng.standard_normal((n, k)))


def test_concat_additivity():
    base = _table(d=93)
    out = concat_signals(base, [_signal("pagerank")])
    assert out.n_cols == 94
    assert out.provenance[-1] == "pagerank"


def test_concat_empty_is_identity():
    base = _table()
    out = concat_signals(base, [])
    assert np.array_equal(out.values, base.values)
    assert out.names == base.names


def test_concat_duplicate_column_errors():
    base = _table()
    sig = _signal("x")
    with pytest.raises(ValueError, match="duplicate"):
        concat_signals(base, [sig, sig])


def test_concat_order_permutation_same_column_set():
    base = _table()
    a, b = _signal("a", k=2), _signal("b", k=3)
    t1 = concat_signals(base, [a, b])
    t2 = concat_signals(base, [b, a])
    assert set(t1.names) == set(t2.names)
    for name in t1.names:
        assert np.array_equal(t1.values[:, t1.names.index(name)],
                              t2.values[:, t2.names.index(name)])


def _labels(n_illicit=10, n_licit=90, n_unlabeled=20):
    labels = np.array([1] * n_illicit + [0] * n_licit + [-1] * n_unlabeled)
    return LabelVector(labels)


def test_stratified_split_exact_proportions():
    lv = _labels()
    spec = stratified_split(lv, seed=1)
    y = lv.labels
    for part, n_ill, n_lic in [(spec.train, 6, 54), (spec.val, 2, 18),
                               (spec.test, 2, 18)]:
        assert (y[part] == 1).sum() == n_ill
        assert (y[part] == 0).sum() == n_lic
    joint = np.concatenate([spec.train, spec.val, spec.test])
    assert len(np.unique(joint)) == 100
    assert set(joint.tolist()) == set(lv.labeled_idx.tolist())


def test_stratified_split_remainder_train_first():
    lv = LabelVector(np.array([1] * 7 + [0] * 90))
    spec = stratified_split(lv, seed=0)
    y = lv.labels
    assert (y[spec.train] == 1).sum() == 5  # floor(4.2) + remainder
    assert (y[spec.val] == 1).sum() == 1
    assert (y[spec.test] == 1).sum() == 1


def test_stratified_split_deterministic():
    lv = _labels()
    s1 = stratified_split(lv, seed=7)
    s2 = stratified_split(lv, seed=7)
    assert s1.digest() == s2.digest()
    assert np.array_equal(s1.train, s2.train)
    s3 = stratified_split(lv, seed=8)
    assert s3.digest() != s1.digest()


def test_stratified_split_minimum_class_size():
    lv = LabelVector(np.array([1] * 4 + [0] * 50))
    with pytest.raises(ValueError, match="only 4"):
        stratified_split(lv, seed=0)


def test_split_cache_round_trip(tmp_path):
    lv = _labels()
    ids = [str(i) for i in range(len(lv.labels))]
    spec = stratified_split(lv, seed=3)
    path = tmp_path / "split.csv"
    save_split(spec, ids, path)
    loaded = load_split(path, ids, seed=3)
    assert loaded.digest() == spec.digest()


def test_scaler_standard():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((50, 4)) * 3 + 1
    scaler = fit_scaler(X, "standard")
    out = apply_scaler(scaler, X)
    assert np.abs(out.mean(axis=0)).max() < 1e-10
    assert out.std(axis=0) == pytest.approx(np.ones(4))


def test_scaler_minmax_no_clipping():
    X = np.array([[0.0], [1.0], [2.0]])
    scaler = fit_scaler(X, "minmax")
    out = apply_scaler(scaler, np.array([[3.0], [-1.0]]))
    assert out[0, 0] == pytest.approx(1.5)   # values may exceed [0, 1]
    assert out[1, 0] == pytest.approx(-0.5)


def test_scaler_constant_column_zero():
    X = np.full((10, 2), 7.0)
    for mode in ("standard", "minmax"):
        out = apply_scaler(fit_scaler(X, mode), X)
        assert np.all(out == 0.0)


def test_pca_full_rank_preserves():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((40, 8))
    red = pca_reduce(X, 8)
    Z = red.apply(X)
    recon = Z @ red.components + red.mean
    assert np.abs(recon - X).max() < 1e-8


def test_pca_variance_fraction_dominant_direction():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(6)
    t = rng.standard_normal(200)
    X = np.outer(t, u) * 10 + rng.standard_normal((200, 6)) * 0.1
    red = pca_reduce(X, 0.95)
    assert red.n_components == 1


def test_pca_clamps_and_sign_convention():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((20, 3))
    red = pca_reduce(X, 64)
    assert red.n_components == 3
    for j in range(3):
        nz = np.flatnonzero(np.abs(red.components[j]) > 1e-12)
        assert red.components[j, nz[0]] > 0


def test_oversample_ratios():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((100, 2))
    y = np.array([1] * 10 + [0] * 90)
    X2, y2 = oversample(X, y, ratio=1.0, seed=0)
    assert (y2 == 1).sum() == 90
    X3, y3 = oversample(X, y, ratio=0.5, seed=0)
    assert (y3 == 1).sum() == 45
    # originals retained
    assert np.array_equal(X3[:100], X)


def test_oversample_deterministic():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((50, 2))
    y = np.array([1] * 5 + [0] * 45)
    _, y1 = oversample(X, y, 0.8, seed=3)
    X2, y2 = oversample(X, y, 0.8, seed=3)
    assert np.array_equal(y1, y2)


def test_fit_never_touches_val_or_test_rows():
    rng = np.random.default_rng(9)
    raw = rng.standard_normal((60, 4))
    labels = LabelVector(np.array([1] * 12 + [0] * 48))
    split = stratified_split(labels, seed=2)
    tracked = AccessTracker(raw)
    X_train = tracked[split.train]
    scaler = fit_scaler(X_train, "standard")
    pca = pca_reduce(apply_scaler(scaler, X_train), 2)
    allowed = set(split.train.tolist())
    assert tracked.accessed_rows <= allowed
    # transform of val rows is allowed, fitting stats must not change
    center_before = scaler.center.copy()
    apply_scaler(scaler, tracked[split.val])
    assert np.array_equal(center_before, scaler.center)
