"""Ranking and thresholded classification metrics.

AUROC is computed by the rank (Mann-Whitney) formulation with average
ranks on ties, which equals the trapezoidal area under the ROC curve
constructed from one point per distinct score threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidInput, NonFiniteValue, NoPositives, SingleClass


def _validate_scores_labels(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or y.ndim != 1:
        raise InvalidInput("scores and labels must be 1-d")
    if len(s) != len(y):
        raise DimensionMismatch(f"{len(s)} scores vs {len(y)} labels")
    if len(s) == 0:
        raise InvalidInput("need at least one sample")
    if not np.all(np.isfinite(s)):
        raise NonFiniteValue("scores contain non-finite values")
    y = y.astype(np.int64)
    if not np.all((y == 0) | (y == 1)):
        raise InvalidInput("labels must be 0/1")
    return s, y


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks with tied scores sharing their average rank."""
    uniq, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    del uniq
    ends = np.cumsum(counts)
    starts = ends - counts + 1
    avg = (starts + ends) / 2.0
    return avg[inverse]


def auroc(scores, labels) -> float:
    """Probability a positive outranks a negative (ties count half)."""
    s, y = _validate_scores_labels(scores, labels)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUROC needs both classes")
    ranks = _average_ranks(s)
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass(frozen=True)
class Curve:
    """A metric curve: per-point x, y, and the threshold that produced it."""

    x: np.ndarray
    y: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        if not (len(self.x) == len(self.y) == len(self.thresholds)):
            raise InvalidInput("curve arrays must share one length")

    def __len__(self) -> int:
        return len(self.x)


def _threshold_counts(s: np.ndarray, y: np.ndarray):
    """Cumulative tp/fp at each distinct score, descending."""
    order = np.argsort(-s, kind="mergesort")
    s_sorted = s[order]
    y_sorted = y[order]
    cum_tp = np.cumsum(y_sorted)
    cum_fp = np.cumsum(1 - y_sorted)
    # Last index of each tied block marks the counts at that threshold.
    block_end = np.where(np.diff(s_sorted) != 0)[0]
    idx = np.concatenate([block_end, [len(s_sorted) - 1]])
    return s_sorted[idx], cum_tp[idx], cum_fp[idx]


def roc_curve(scores, labels) -> Curve:
    """ROC points, one per distinct threshold (descending) after (0, 0).

    x is the false-positive rate, y the true-positive rate; the lowest
    threshold always yields the terminal (1, 1) point. The trapezoid area
    under this curve equals auroc() to numerical precision.
    """
    s, y = _validate_scores_labels(scores, labels)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both classes")
    thr, tp, fp = _threshold_counts(s, y)
    x = np.concatenate([[0.0], fp / n_neg])
    ty = np.concatenate([[0.0], tp / n_pos])
    thresholds = np.concatenate([[np.inf], thr])
    return Curve(x=x, y=ty, thresholds=thresholds)


def trapezoid_area(curve: Curve) -> float:
    return float(np.trapezoid(curve.y, curve.x))


def pr_curve(scores, labels) -> Curve:
    """Precision-recall points per distinct threshold, descending.

    x is recall, y precision. The curve stops at the first threshold
    reaching full recall; with a single distinct score this is one point
    (1, base rate).
    """
    s, y = _validate_scores_labels(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise NoPositives("precision-recall needs a positive sample")
    thr, tp, fp = _threshold_counts(s, y)
    recall = tp / n_pos
    precision = tp / np.maximum(tp + fp, 1)
    stop = int(np.argmax(recall >= 1.0)) + 1
    return Curve(x=recall[:stop], y=precision[:stop], thresholds=thr[:stop])


@dataclass(frozen=True)
class EvalReport:
    """Thresholded confusion metrics plus the ranking AUROC.

    degenerate marks reports where an undefined ratio was forced to 0
    (no predicted positives, or a single-class label set for AUROC).
    """

    precision: float
    recall: float
    f1: float
    auroc: float
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auroc": self.auroc,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "threshold": self.threshold,
            "degenerate": self.degenerate,
        }


def classification_report(scores, labels, threshold: float) -> EvalReport:
    """Confusion counts and P/R/F1 at `scores >= threshold`, plus AUROC."""
    s, y = _validate_scores_labels(scores, labels)
    pred = s >= threshold
    tp = int(np.sum(pred & (y == 1)))
    fp = int(np.sum(pred & (y == 0)))
    tn = int(np.sum(~pred & (y == 0)))
    fn = int(np.sum(~pred & (y == 1)))

    degenerate = False
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision, degenerate = 0.0, True
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall, degenerate = 0.0, True
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0

    if 0 < y.sum() < len(y):
        auc = auroc(s, y)
    else:
        auc, degenerate = 0.0, True
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        auroc=auc,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        threshold=float(threshold),
        degenerate=degenerate,
    )


def write_curve_csv(path, curve: Curve) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("threshold", "x", "y"))
        for t, x, y in zip(curve.thresholds, curve.x, curve.y):
            writer.writerow((repr(float(t)), repr(float(x)), repr(float(y))))
