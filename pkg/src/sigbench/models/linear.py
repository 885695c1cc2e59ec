"""Logistic regression and linear hinge-loss SVM.

Logistic regression minimizes (optionally L2-regularized) cross-entropy to
a 1e-6 gradient norm or the iteration cap, via scipy L-BFGS or a SAGA loop
per the solver hyperparameter. The SVM trains with Pegasos-style SGD and
calibrates a logistic link over training margins so that HPO can evaluate
cross-entropy on it.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

GRAD_TOL = 1e-6
LOGREG_MAX_ITER = 1000
SAGA_EPOCHS = 100
SVM_EPOCHS = 30


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0)))


def logreg_objective(wb: np.ndarray, X: np.ndarray, y_pm: np.ndarray,
                     sample_weight: np.ndarray, C: float, penalty) -> tuple[float, np.ndarray]:
    """sklearn-convention objective: 0.5 ||w||^2 + C * sum_i s_i log-loss_i.

    The intercept (last entry of ``wb``) is unpenalized; with penalty None
    the quadratic term is dropped. Returns (value, gradient).
    """
    w, b = wb[:-1], wb[-1]
    z = y_pm * (X @ w + b)
    loss = np.logaddexp(0.0, -z)
    sig = _sigmoid(-z)
    val = C * np.sum(sample_weight * loss)
    coef = -C * sample_weight * sig * y_pm
    grad_w = X.T @ coef
    grad_b = coef.sum()
    if penalty == "l2":
        val += 0.5 * w @ w
        grad_w = grad_w + w
    return val, np.append(grad_w, grad_b)


class LogRegModel:
    def __init__(self, w, b, meta=None):
        self.family = "logreg"
        self.w = w
        self.b = b
        self.meta = meta or {}

    def decision_function(self, X):
        return X @ self.w + self.b

    def predict_proba(self, X):
        p = _sigmoid(self.decision_function(X))
        return np.column_stack([1 - p, p])

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(np.int64)


def train_logreg(X, y, sample_weight, params: dict, seed: int) -> LogRegModel:
    y_pm = np.where(y == 1, 1.0, -1.0)
    C = float(params.get("C", 1.0))
    penalty = params.get("penalty", "l2")
    solver = params.get("solver", "lbfgs")
    d = X.shape[1]
    if solver == "saga":
        w, b, meta = _saga(X, y_pm, sample_weight, C, penalty, seed)
        return LogRegModel(w, b, meta)
    res = minimize(logreg_objective, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                   args=(X, y_pm, sample_weight, C, penalty),
                   options={"maxiter": LOGREG_MAX_ITER, "gtol": GRAD_TOL,
                            "ftol": 1e-14})
    return LogRegModel(res.x[:-1], res.x[-1],
                       {"converged": bool(res.success), "iterations": int(res.nit),
                        "grad_norm": float(np.max(np.abs(res.jac)))})


def _saga(X, y_pm, sample_weight, C, penalty, seed):
    """SAGA incremental gradient descent on the same objective."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    # per-sample loss-gradient scalar memory; table average kept incrementally
    g_mem = np.zeros(n)
    avg_w = np.zeros(d)
    avg_b = 0.0
    lam = 1.0 / max(C * n, 1e-12)    # average-objective form: penalty weight
    L = 0.25 * np.max(np.sum(X * X, axis=1)) + lam  # logistic smoothness bound
    step = 1.0 / (3.0 * max(L, 1e-12))
    rng = np.random.default_rng(seed)
    grad_norm = np.inf
    it = 0
    for _ in range(SAGA_EPOCHS):
        for i in rng.integers(0, n, size=n):
            z = y_pm[i] * (X[i] @ w + b)
            g_new = -sample_weight[i] * _sigmoid(-z) * y_pm[i]
            delta = g_new - g_mem[i]
            gw = delta * X[i] + avg_w + (lam * w if penalty == "l2" else 0.0)
            gb = delta + avg_b
            w -= step * gw
            b -= step * gb
            avg_w += delta * X[i] / n
            avg_b += delta / n
            g_mem[i] = g_new
        it += 1
        full_val, full_grad = logreg_objective(
            np.append(w, b), X, y_pm, sample_weight, C, penalty)
        grad_norm = np.max(np.abs(full_grad))
        if grad_norm < GRAD_TOL:
            break
    return w, b, {"converged": grad_norm < GRAD_TOL, "epochs": it,
                  "grad_norm": float(grad_norm)}


class LinearSVMModel:
    def __init__(self, w, b, calib):
        self.family = "linear_svm"
        self.w = w
        self.b = b
        self.calib = calib   # (a, c): p = sigmoid(a * margin + c)

    def decision_function(self, X):
        return X @ self.w + self.b

    def predict_proba(self, X):
        a, c = self.calib
        p = _sigmoid(a * self.decision_function(X) + c)
        return np.column_stack([1 - p, p])

    def predict(self, X):
        # label = argmax(proba): the calibrated link is monotone in the margin
        return self.predict_proba(X).argmax(axis=1)


def train_linear_svm(X, y, sample_weight, params: dict, seed: int) -> LinearSVMModel:
    """Pegasos-style hinge SGD, then a logistic link fitted on train margins."""
    y_pm = np.where(y == 1, 1.0, -1.0)
    n, d = X.shape
    C = float(params.get("C", 1.0))
    lam = 1.0 / (C * n)
    radius = 1.0 / np.sqrt(lam)
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(SVM_EPOCHS):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margin = y_pm[i] * (X[i] @ w + b)
            w *= (1.0 - eta * lam)
            if margin < 1.0:
                w += eta * sample_weight[i] * y_pm[i] * X[i]
                b += eta * sample_weight[i] * y_pm[i] * 0.01  # slow intercept
            norm = np.linalg.norm(w)
            if norm > radius:  # Pegasos ball projection keeps early steps sane
                w *= radius / norm
    margins = X @ w + b
    calib = _fit_platt(margins, y, sample_weight)
    return LinearSVMModel(w, b, calib)


def _fit_platt(margins, y, sample_weight):
    """1-D logistic fit p(y=1 | margin) = sigmoid(a * margin + c), a >= 0."""
    y_pm = np.where(y == 1, 1.0, -1.0)

    def obj(ab):
        a, c = ab
        z = y_pm * (a * margins + c)
        val = np.sum(sample_weight * np.logaddexp(0.0, -z))
        sig = _sigmoid(-z)
        coef = -sample_weight * sig * y_pm
        return val, np.array([coef @ margins, coef.sum()])

    res = minimize(obj, np.array([1.0, 0.0]), jac=True, method="L-BFGS-B",
                   bounds=[(0.0, None), (None, None)],
                   options={"maxiter": 200})
    return float(res.x[0]), float(res.x[1])
