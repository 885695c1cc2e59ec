"""Histogram-binned tree ensembles: random forest and gradient boosting.

Features are quantile-binned once per fit. The whole forest grows
level-synchronously: every (tree, node) pair of a depth is scored through a
handful of vectorized bincount passes, which keeps pure-numpy training fast
enough for repeated HPO trials while staying deterministic for a fixed
seed.
"""

from __future__ import annotations

import numpy as np

MAX_BINS = 32
_DEPTH_CAP = 64          # max_depth None still terminates on purity
_CHUNK_CELLS = 1 << 23   # bincount workspace bound per level chunk


class BinMapper:
    """Per-column quantile bin edges fitted on training rows."""

    def __init__(self, X: np.ndarray, max_bins: int = MAX_BINS):
        X = np.asarray(X, dtype=np.float64)
        self.edges = []
        for j in range(X.shape[1]):
            uniq = np.unique(X[:, j])
            if len(uniq) <= 1:
                self.edges.append(np.empty(0))
            elif len(uniq) <= max_bins:
                self.edges.append((uniq[1:] + uniq[:-1]) / 2.0)
            else:
                qs = np.quantile(X[:, j], np.linspace(0, 1, max_bins + 1)[1:-1])
                self.edges.append(np.unique(qs))
        self.n_bins = np.array([len(e) + 1 for e in self.edges])

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape, dtype=np.uint8)
        for j, edges in enumerate(self.edges):
            out[:, j] = np.searchsorted(edges, X[:, j], side="right")
        return out


class Forest:
    """Flat arena of T trees; tree t's root is node t."""

    def __init__(self, n_trees: int, feature, threshold, left, right, value):
        self.n_trees = n_trees
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value            # (n_nodes, V)

    def predict_value(self, Xb: np.ndarray) -> np.ndarray:
        """Mean leaf value over trees for every row of binned input."""
        n = len(Xb)
        node = np.tile(np.arange(self.n_trees), n)         # row-major (row, tree)
        row = np.repeat(np.arange(n), self.n_trees)
        while True:
            internal = self.feature[node] >= 0
            if not internal.any():
                break
            idx = np.flatnonzero(internal)
            f = self.feature[node[idx]]
            go_left = Xb[row[idx], f] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])
        vals = self.value[node].reshape(n, self.n_trees, -1)
        return vals.mean(axis=1)


def _grow_forest(Xb, row_sets, stats, n_bins, rng, *, max_features, max_depth,
                 split_scorer, leaf_value, min_split_count=2) -> Forest:
    """Level-synchronous greedy growth of ``len(row_sets)`` trees.

    ``row_sets[t]`` holds tree t's training row indices into ``Xb`` (with
    multiplicity for bootstrap); ``stats`` gives per (tree, slot) statistic
    columns aligned with the concatenation of row_sets. ``split_scorer``
    maps left/right stat sums and raw counts to gains (-inf = invalid) and
    ``leaf_value`` maps stat-sum rows to node value rows.
    """
    n_trees = len(row_sets)
    d = Xb.shape[1]
    B = int(n_bins.max())
    sample_row = np.concatenate(row_sets)
    sample_tree = np.repeat(np.arange(n_trees), [len(r) for r in row_sets])
    n_total = len(sample_row)

    root_stats = np.zeros((n_trees, stats.shape[1]))
    for s in range(stats.shape[1]):
        root_stats[:, s] = np.bincount(sample_tree, weights=stats[:, s],
                                       minlength=n_trees)
    feature = [np.full(n_trees, -1, dtype=np.int64)]
    threshold = [np.full(n_trees, -1, dtype=np.int64)]
    left = [np.full(n_trees, -1, dtype=np.int64)]
    right = [np.full(n_trees, -1, dtype=np.int64)]
    value = [leaf_value(root_stats)]
    arena_size = n_trees

    sample_node = sample_tree.copy()       # root of tree t is node t
    live = np.arange(n_total)
    level_start, level_end = 0, n_trees
    depth = 0
    depth_cap = max_depth if max_depth is not None else _DEPTH_CAP
    while len(live) and depth < depth_cap:
        n_nodes = level_end - level_start
        node_of = sample_node[live] - level_start
        order = np.argsort(node_of, kind="stable")
        live = live[order]
        node_of = node_of[order]
        bounds = np.searchsorted(node_of, np.arange(n_nodes + 1))
        F = max_features if max_features is not None else d
        # batched per-node feature subsets (sorted for stable histogram layout)
        if F < d:
            feats = np.sort(np.argsort(rng.random((n_nodes, d)), axis=1)[:, :F],
                            axis=1)
        else:
            feats = np.tile(np.arange(d), (n_nodes, 1))
        split_feat = np.full(n_nodes, -1, dtype=np.int64)
        split_bin = np.full(n_nodes, -1, dtype=np.int64)
        chunk_nodes = max(1, _CHUNK_CELLS // max(1, F * B * (stats.shape[1] + 1)))
        for c0 in range(0, n_nodes, chunk_nodes):
            c1 = min(c0 + chunk_nodes, n_nodes)
            lo, hi = bounds[c0], bounds[c1]
            if hi == lo:
                continue
            rows = live[lo:hi]
            slot = node_of[lo:hi] - c0
            sub_feats = feats[c0:c1]
            bins = Xb[sample_row[rows][:, None], sub_feats[slot]]
            key = ((slot[:, None] * F + np.arange(F)[None, :]) * B + bins).ravel()
            size = (c1 - c0) * F * B
            counts = np.bincount(key, minlength=size).reshape(c1 - c0, F, B)
            hists = np.empty((c1 - c0, F, B, stats.shape[1]))
            for s in range(stats.shape[1]):
                hists[..., s] = np.bincount(
                    key, weights=np.repeat(stats[rows, s], F),
                    minlength=size).reshape(c1 - c0, F, B)
            cum = np.cumsum(hists, axis=2)
            cum_n = np.cumsum(counts, axis=2)
            tot = cum[:, :1, -1, :]
            tot_n = cum_n[:, :1, -1]
            hl = cum[:, :, :-1, :]
            hr = tot[:, :, None, :] - hl
            cl = cum_n[:, :, :-1]
            cr = tot_n[:, :, None] - cl
            gains = split_scorer(hl, hr, cl, cr)
            gains = np.where((cl > 0) & (cr > 0), gains, -np.inf)
            flat = gains.reshape(c1 - c0, -1)
            best = np.argmax(flat, axis=1)
            best_gain = flat[np.arange(c1 - c0), best]
            ok = ((tot_n[:, 0] >= min_split_count) & (best_gain > 0)
                  & np.isfinite(best_gain))
            fi, bi = np.divmod(best, B - 1)
            split_feat[c0:c1][ok] = sub_feats[np.flatnonzero(ok), fi[ok]]
            split_bin[c0:c1][ok] = bi[ok]
        splitting = np.flatnonzero(split_feat >= 0)
        if len(splitting) == 0:
            break
        k = len(splitting)
        # compact mapping: local split slot per splitting node
        split_slot = np.full(n_nodes, -1, dtype=np.int64)
        split_slot[splitting] = np.arange(k)
        samp_slot = split_slot[node_of]
        on_split = samp_slot >= 0
        rows = live[on_split]
        s_slot = samp_slot[on_split]
        go_left = (Xb[sample_row[rows], split_feat[node_of[on_split]]]
                   <= split_bin[node_of[on_split]])
        pair = s_slot * 2 + (~go_left).astype(np.int64)
        child_stats = np.zeros((2 * k, stats.shape[1]))
        for s in range(stats.shape[1]):
            child_stats[:, s] = np.bincount(pair, weights=stats[rows, s],
                                            minlength=2 * k)
        new_ids = arena_size + np.arange(2 * k)
        # write split metadata into the current level's arena block
        feature[-1][splitting] = split_feat[splitting]
        threshold[-1][splitting] = split_bin[splitting]
        left[-1][splitting] = new_ids[0::2]
        right[-1][splitting] = new_ids[1::2]
        feature.append(np.full(2 * k, -1, dtype=np.int64))
        threshold.append(np.full(2 * k, -1, dtype=np.int64))
        left.append(np.full(2 * k, -1, dtype=np.int64))
        right.append(np.full(2 * k, -1, dtype=np.int64))
        value.append(leaf_value(child_stats))
        sample_node[rows] = arena_size + pair
        live = rows
        level_start, level_end = arena_size, arena_size + 2 * k
        arena_size += 2 * k
        depth += 1
    return Forest(n_trees, np.concatenate(feature), np.concatenate(threshold),
                  np.concatenate(left), np.concatenate(right),
                  np.vstack(value))


# --------------------------------------------------------------------------
# random forest
# --------------------------------------------------------------------------

class RandomForestModel:
    def __init__(self, forest: Forest, mapper: BinMapper):
        self.family = "random_forest"
        self.forest = forest
        self.mapper = mapper

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.forest.predict_value(self.mapper.transform(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)


def _gini_gain(hl, hr):
    """Weighted Gini impurity decrease for binary class-weight histograms."""
    wl = hl[..., 0] + hl[..., 1]
    wr = hr[..., 0] + hr[..., 1]
    wp = wl + wr
    with np.errstate(divide="ignore", invalid="ignore"):
        gl = 1.0 - (hl[..., 0] ** 2 + hl[..., 1] ** 2) / np.maximum(wl, 1e-300) ** 2
        gr = 1.0 - (hr[..., 0] ** 2 + hr[..., 1] ** 2) / np.maximum(wr, 1e-300) ** 2
        h0 = hl[..., 0] + hr[..., 0]
        h1 = hl[..., 1] + hr[..., 1]
        gp = 1.0 - (h0 ** 2 + h1 ** 2) / np.maximum(wp, 1e-300) ** 2
        gain = gp - (wl * gl + wr * gr) / np.maximum(wp, 1e-300)
    return np.where((wl > 0) & (wr > 0), gain, -np.inf)


def train_random_forest(X, y, sample_weight, params: dict, seed: int) -> RandomForestModel:
    n, d = X.shape
    mapper = BinMapper(X)
    Xb = mapper.transform(X)
    n_estimators = int(params.get("n_estimators", 100))
    max_depth = params.get("max_depth", None)
    min_split = int(params.get("min_samples_split", 2))
    min_leaf = int(params.get("min_samples_leaf", 1))
    mf = params.get("max_features", "sqrt")
    if mf == "sqrt":
        max_features = max(1, int(np.sqrt(d)))
    elif mf == "log2":
        max_features = max(1, int(np.log2(d)))
    else:
        max_features = None

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    row_sets = [rng.integers(0, n, size=n) for _ in range(n_estimators)]
    flat_rows = np.concatenate(row_sets)
    stats = np.zeros((len(flat_rows), 2))
    stats[np.arange(len(flat_rows)), y[flat_rows]] = sample_weight[flat_rows]

    def scorer(hl, hr, cl, cr):
        gains = _gini_gain(hl, hr)
        return np.where((cl >= min_leaf) & (cr >= min_leaf), gains, -np.inf)

    def leaf(stat_sums):
        tot = stat_sums.sum(axis=1, keepdims=True)
        out = np.divide(stat_sums, tot, out=np.full_like(stat_sums, 0.5),
                        where=tot > 0)
        return out

    # stats are indexed by concatenated (tree, slot); remap row lookup
    forest = _grow_forest(Xb, row_sets, stats, mapper.n_bins, rng,
                          max_features=max_features, max_depth=max_depth,
                          split_scorer=scorer, leaf_value=leaf,
                          min_split_count=min_split)
    model = RandomForestModel(forest, mapper)
    return model


# --------------------------------------------------------------------------
# gradient-boosted trees (histogram, logistic loss)
# --------------------------------------------------------------------------

class GBTModel:
    def __init__(self, forests, mapper, base_score, learning_rate):
        self.family = "gbt"
        self.forests = forests      # one single-tree Forest per round
        self.mapper = mapper
        self.base_score = base_score
        self.learning_rate = learning_rate

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        Xb = self.mapper.transform(X)
        f = np.full(len(Xb), self.base_score)
        for forest in self.forests:
            f += self.learning_rate * forest.predict_value(Xb)[:, 0]
        return f

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p = 1.0 / (1.0 + np.exp(-np.clip(self.decision_function(X), -35, 35)))
        return np.column_stack([1.0 - p, p])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int64)


def train_gbt(X, y, sample_weight, params: dict, seed: int) -> GBTModel:
    n, d = X.shape
    mapper = BinMapper(X)
    Xb = mapper.transform(X)
    n_rounds = int(params.get("n_estimators", 100))
    max_depth = int(params.get("max_depth", 3))
    lr = float(params.get("learning_rate", 0.1))
    subsample = float(params.get("subsample", 1.0))
    colsample = float(params.get("colsample_bytree", 1.0))
    min_child = float(params.get("min_child_weight", 1e-1))
    gamma = float(params.get("gamma", 0.0))
    alpha = float(params.get("reg_alpha", 0.0))
    lam = float(params.get("reg_lambda", 1.0))

    w = sample_weight
    p0 = np.clip((w * y).sum() / w.sum(), 1e-12, 1 - 1e-12)
    base = float(np.log(p0 / (1 - p0)))
    F = np.full(n, base)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    forests = []

    def scorer(hl, hr, cl, cr):
        GL, HL = hl[..., 0], hl[..., 1]
        GR, HR = hr[..., 0], hr[..., 1]
        GP, HP = GL + GR, HL + HR

        def leaf_obj(G, H):
            Gs = np.sign(G) * np.maximum(np.abs(G) - alpha, 0.0)
            return Gs ** 2 / (H + lam)

        gain = 0.5 * (leaf_obj(GL, HL) + leaf_obj(GR, HR) - leaf_obj(GP, HP)) - gamma
        return np.where((HL >= min_child) & (HR >= min_child), gain, -np.inf)

    def leaf(stat_sums):
        G, H = stat_sums[:, 0], stat_sums[:, 1]
        Gs = np.sign(G) * np.maximum(np.abs(G) - alpha, 0.0)
        return (-Gs / (H + lam))[:, None]

    for _ in range(n_rounds):
        p = 1.0 / (1.0 + np.exp(-np.clip(F, -35, 35)))
        g = w * (p - y)
        h = np.maximum(w * p * (1 - p), 1e-12)
        if subsample < 1.0:
            rows = np.flatnonzero(rng.random(n) < subsample)
            if len(rows) == 0:
                rows = np.arange(n)
        else:
            rows = np.arange(n)
        if colsample < 1.0:
            kc = max(1, int(round(colsample * d)))
            cols = np.sort(rng.choice(d, size=kc, replace=False))
        else:
            cols = np.arange(d)
        stats = np.column_stack([g[rows], h[rows]])
        tree = _grow_forest(Xb[:, cols], [rows], stats, mapper.n_bins[cols],
                            rng, max_features=None, max_depth=max_depth,
                            split_scorer=scorer, leaf_value=leaf)
        internal = tree.feature >= 0
        tree.feature[internal] = cols[tree.feature[internal]]
        F += lr * tree.predict_value(Xb)[:, 0]
        forests.append(tree)
    return GBTModel(forests, mapper, base, lr)
