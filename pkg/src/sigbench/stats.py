"""Metrics, trimmed aggregation and paired McNemar significance testing.

These are the protocol primitives: per-run confusion metrics, the
drop-min/drop-max trimmed mean over seeds, the continuity-corrected McNemar
statistic on paired predictions, and the cross-seed significance counting
that summarizes how often an augmented model significantly beats (or loses
to) its baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricBundle:
    f1: float
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int
    tn: int

    def as_dict(self) -> dict:
        return {
            "f1": self.f1, "precision": self.precision, "recall": self.recall,
            "tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
        }


@dataclass(frozen=True)
class McNemarResult:
    b: int          # baseline correct, augmented wrong
    c: int          # baseline wrong, augmented correct
    chi2: float
    p: float
    direction: str  # improvement | deterioration | none

    def as_dict(self) -> dict:
        return {"b": self.b, "c": self.c, "chi2": self.chi2, "p": self.p,
                "direction": self.direction}


@dataclass(frozen=True)
class SignificanceSummary:
    n_better: int
    n_worse: int
    n_seeds: int


def metrics(pred, truth, positive_class=1) -> MetricBundle:
    """Confusion-matrix metrics with the zero-denominator-means-zero convention."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    pos_pred = pred == positive_class
    pos_true = truth == positive_class
    tp = int(np.sum(pos_pred & pos_true))
    fp = int(np.sum(pos_pred & ~pos_true))
    fn = int(np.sum(~pos_pred & pos_true))
    tn = int(np.sum(~pos_pred & ~pos_true))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricBundle(f1, precision, recall, tp, fp, fn, tn)


def trimmed_mean(scores) -> float:
    """Mean after dropping exactly one minimum and one maximum (first occurrence)."""
    return float(np.mean(_trim(scores)))


def trimmed_std(scores, ddof: int = 1) -> float:
    """Standard deviation over the same trimmed set used by :func:`trimmed_mean`.

    A single surviving score (S = 3) has no dispersion estimate; returns 0.
    """
    kept = _trim(scores)
    if len(kept) <= ddof:
        return 0.0
    return float(np.std(kept, ddof=ddof))


def _trim(scores) -> np.ndarray:
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < 3:
        raise ValueError(f"trimmed aggregation needs at least 3 scores, got {arr.shape}")
    keep = np.ones(len(arr), dtype=bool)
    keep[int(np.argmin(arr))] = False
    # argmax on the already-masked view so that min==max lists drop two entries
    idx = np.flatnonzero(keep)
    keep[idx[int(np.argmax(arr[idx]))]] = False
    return arr[keep]


def delta_f1(trim_aug: float, trim_base: float) -> float:
    """Trimmed-mean F1 gain of the augmented model; positive means improvement."""
    return trim_aug - trim_base


def chi_square_sf(x: float, df: int = 1) -> float:
    """Chi-square survival function; df=1 goes through erfc(sqrt(x/2))."""
    if x < 0:
        raise ValueError("chi-square statistic must be non-negative")
    if df == 1:
        return math.erfc(math.sqrt(x / 2.0))
    # general df via the regularized upper incomplete gamma
    from scipy.special import gammaincc
    return float(gammaincc(df / 2.0, x / 2.0))


def mcnemar(pred_base, pred_aug, truth) -> McNemarResult:
    """Continuity-corrected McNemar test on paired predictions.

    b counts test rows the baseline got right and the augmented model got
    wrong; c counts the reverse. b + c == 0 is defined as non-significant
    (chi2 = 0, p = 1).
    """
    pred_base = np.asarray(pred_base)
    pred_aug = np.asarray(pred_aug)
    truth = np.asarray(truth)
    if not (pred_base.shape == pred_aug.shape == truth.shape):
        raise ValueError("paired vectors must have identical length")
    base_ok = pred_base == truth
    aug_ok = pred_aug == truth
    b = int(np.sum(base_ok & ~aug_ok))
    c = int(np.sum(~base_ok & aug_ok))
    if b + c == 0:
        chi2, p = 0.0, 1.0
    else:
        chi2 = (abs(b - c) - 1) ** 2 / (b + c)
        p = chi_square_sf(chi2, df=1)
    if c > b:
        direction = "improvement"
    elif b > c:
        direction = "deterioration"
    else:
        direction = "none"
    return McNemarResult(b=b, c=c, chi2=chi2, p=p, direction=direction)


def significance_counts(results, alpha: float = 0.05) -> SignificanceSummary:
    """Tally significant improvements (c>b) and deteriorations (b>c) across seeds."""
    n_better = sum(1 for r in results if r.p <= alpha and r.c > r.b)
    n_worse = sum(1 for r in results if r.p <= alpha and r.b > r.c)
    return SignificanceSummary(n_better=n_better, n_worse=n_worse, n_seeds=len(results))


def cross_entropy(proba, y) -> float:
    """Mean negative log-likelihood of binary labels under predicted probabilities.

    ``proba`` is either a 1-D positive-class probability vector or an (n, 2)
    matrix; values are clipped to [1e-12, 1 - 1e-12].
    """
    proba = np.asarray(proba, dtype=np.float64)
    y = np.asarray(y)
    if proba.ndim == 2:
        proba = proba[:, 1]
    proba = np.clip(proba, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(np.where(y == 1, np.log(proba), np.log1p(-proba))))
