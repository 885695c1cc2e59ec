"""Hyperparameter search domains per classifier family.

Parameters not listed stay at implementation defaults. The gradient-boosted
trees space mirrors the XGBoost domain it replaces; the linear SVM space is
the linear-kernel SVC row. ``oversample_ratio`` is sampled wherever the
balancing choice includes oversampling and is ignored otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Param:
    kind: str                      # choice | uniform | loguniform | quniform
    options: tuple = ()
    lo: float = 0.0
    hi: float = 1.0
    step: float = 1.0

    def contains(self, value) -> bool:
        if self.kind == "choice":
            return any(value == o or (value is o) for o in self.options)
        if value is None:
            return False
        if self.kind == "quniform":
            return self.lo - 1e-9 <= value <= self.hi + 1e-9
        return self.lo - 1e-12 <= value <= self.hi + 1e-12


def choice(*options) -> Param:
    return Param("choice", options=tuple(options))


def uniform(lo, hi) -> Param:
    return Param("uniform", lo=lo, hi=hi)


def loguniform(lo, hi) -> Param:
    return Param("loguniform", lo=lo, hi=hi)


def quniform(lo, hi, step=1) -> Param:
    return Param("quniform", lo=lo, hi=hi, step=step)


@dataclass
class SearchSpace:
    family: str
    params: dict = field(default_factory=dict)

    def validate(self, values: dict) -> None:
        for name, value in values.items():
            if name not in self.params:
                raise ValueError(f"{self.family}: unknown hyperparameter {name!r}")
            if not self.params[name].contains(value):
                raise ValueError(
                    f"{self.family}: {name}={value!r} outside its search domain")


_BALANCE3 = choice("none", "oversampling", "class_weights")
_RATIO = uniform(0.5, 1.0)

SEARCH_SPACES: dict[str, SearchSpace] = {
    "logreg": SearchSpace("logreg", {
        "penalty": choice("l2", None),
        "C": loguniform(0.001, 10.0),
        "solver": choice("lbfgs", "saga"),
        "balancing_strategy": _BALANCE3,
        "oversample_ratio": _RATIO,
        "use_emb_pca": choice(False, True),
        "emb_pca_n": choice(16, 32, 48, 64, 0.95),
    }),
    "random_forest": SearchSpace("random_forest", {
        "n_estimators": quniform(100, 600, 25),
        "max_depth": choice(None, 5, 8, 12, 16, 20, 30, 40),
        "min_samples_split": quniform(2, 10, 1),
        "min_samples_leaf": quniform(1, 5, 1),
        "max_features": choice("sqrt", "log2", None),
        "balancing_strategy": _BALANCE3,
        "oversample_ratio": _RATIO,
    }),
    "linear_svm": SearchSpace("linear_svm", {
        "C": loguniform(1e-3, 1e2),
    }),
    "gbt": SearchSpace("gbt", {
        "n_estimators": quniform(50, 500, 25),
        "max_depth": quniform(2, 8, 1),
        "learning_rate": loguniform(0.01, 0.3),
        "subsample": uniform(0.6, 1.0),
        "colsample_bytree": uniform(0.6, 1.0),
        "min_child_weight": loguniform(1e-1, 10.0),
        "gamma": loguniform(1e-3, 1.0),
        "reg_alpha": loguniform(1e-6, 1.0),
        "reg_lambda": loguniform(1e-3, 10.0),
        "balancing_strategy": choice("none", "oversampling"),
        "oversample_ratio": _RATIO,
    }),
    "mlp": SearchSpace("mlp", {
        "hidden_layer_sizes": choice((64,), (128,), (256,), (64, 32),
                                     (128, 64), (128, 128), (256, 128)),
        "alpha": loguniform(1e-6, 1e-2),
        "lr_init": loguniform(1e-4, 5e-2),
        "activation": choice("relu", "tanh"),
        "batch_size": choice(64, 128, 256),
        "balancing_strategy": choice("none", "oversampling"),
        "oversample_ratio": _RATIO,
    }),
    "gnb": SearchSpace("gnb", {
        "var_smoothing": loguniform(1e-6, 1e-1),
        "balancing_strategy": choice("none", "oversampling", "class_prior_"),
        "oversample_ratio": _RATIO,
        "scaler": choice("standard", "minmax"),
    }),
}

# scaler policy outside gnb (gnb searches it per its table row): scale-variant
# model families use standard scaling, tree ensembles skip scaling
DEFAULT_SCALER = {
    "logreg": "standard",
    "linear_svm": "standard",
    "mlp": "standard",
    "gnb": "standard",
    "random_forest": "none",
    "gbt": "none",
}

FAMILIES = tuple(SEARCH_SPACES)
