"""Ranking and thresholded metrics against brute-force oracles."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voicescreen.errors import NoPositives, NonFiniteValue, SingleClass
from voicescreen.metrics import (
    auroc,
    classification_report,
    pr_curve,
    roc_curve,
    trapezoid_area,
    write_curve_csv,
)


def _brute_auroc(scores, labels):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


# ---------- auroc ----------

def test_auroc_perfect_and_inverted():
    s = np.array([0.9, 0.8, 0.2, 0.1])
    y = np.array([1, 1, 0, 0])
    assert auroc(s, y) == 1.0
    assert auroc(s, 1 - y) == 0.0


def test_auroc_all_tied_is_half():
    assert auroc(np.full(6, 0.5), np.array([1, 0, 1, 0, 1, 0])) == 0.5


def test_auroc_matches_pair_counting():
    r = np.random.default_rng(3)
    scores = np.round(r.uniform(0, 1, 200), 2)
    labels = r.integers(0, 2, 200)
    assert auroc(scores, labels) == pytest.approx(_brute_auroc(scores, labels), abs=1e-12)


def test_auroc_needs_both_classes():
    with pytest.raises(SingleClass):
        auroc(np.array([0.1, 0.2]), np.array([1, 1]))


def test_auroc_rejects_nonfinite_scores():
    with pytest.raises(NonFiniteValue):
        auroc(np.array([0.1, np.nan]), np.array([0, 1]))


def test_auroc_complement_identity():
    r = np.random.default_rng(9)
    s = r.uniform(0, 1, 60)
    y = r.integers(0, 2, 60)
    assert auroc(s, y) + auroc(s, 1 - y) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=4, max_value=40),
    seed=st.integers(min_value=0, max_value=10_000),
    scale=st.floats(min_value=0.1, max_value=50.0),
)
def test_auroc_invariant_to_monotone_transform(n, seed, scale):
    r = np.random.default_rng(seed)
    s = r.standard_normal(n)
    y = r.integers(0, 2, n)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    base = auroc(s, y)
    # strictly increasing maps preserve the ranking, hence the area
    assert auroc(scale * s + 3.0, y) == pytest.approx(base, abs=1e-12)
    assert auroc(np.exp(s), y) == pytest.approx(base, abs=1e-12)


# ---------- roc curve ----------

def test_roc_area_equals_auroc():
    r = np.random.default_rng(3)
    scores = np.round(r.uniform(0, 1, 200), 2)
    labels = r.integers(0, 2, 200)
    c = roc_curve(scores, labels)
    assert trapezoid_area(c) == pytest.approx(auroc(scores, labels), abs=1e-12)


def test_roc_endpoints():
    r = np.random.default_rng(5)
    c = roc_curve(r.uniform(0, 1, 30), r.integers(0, 2, 30))
    assert (c.x[0], c.y[0]) == (0.0, 0.0)
    assert (c.x[-1], c.y[-1]) == (1.0, 1.0)


def test_roc_perfect_passes_through_corner():
    c = roc_curve(np.array([0.9, 0.8, 0.2, 0.1]), np.array([1, 1, 0, 0]))
    assert any(x == 0.0 and y == 1.0 for x, y in zip(c.x, c.y))


def test_roc_single_distinct_score_is_diagonal():
    c = roc_curve(np.full(4, 0.3), np.array([1, 0, 1, 0]))
    assert len(c) == 2
    assert tuple(c.x) == (0.0, 1.0) and tuple(c.y) == (0.0, 1.0)


def test_roc_axes_monotone():
    r = np.random.default_rng(6)
    c = roc_curve(r.uniform(0, 1, 100), r.integers(0, 2, 100))
    assert np.all(np.diff(c.x) >= 0)
    assert np.all(np.diff(c.y) >= 0)


# ---------- pr curve ----------

def test_pr_perfect_ranking_keeps_precision_one():
    c = pr_curve(np.array([0.9, 0.8, 0.2, 0.1]), np.array([1, 1, 0, 0]))
    assert np.all(c.y == 1.0)


def test_pr_all_equal_scores_single_point():
    c = pr_curve(np.full(4, 0.3), np.array([1, 0, 1, 0]))
    assert len(c) == 1
    assert c.x[0] == 1.0 and c.y[0] == 0.5


def test_pr_matches_confusion_counts():
    r = np.random.default_rng(3)
    scores = np.round(r.uniform(0, 1, 200), 2)
    labels = r.integers(0, 2, 200)
    c = pr_curve(scores, labels)
    for thr, recall, precision in zip(c.thresholds, c.x, c.y):
        pred = scores >= thr
        tp = int(np.sum(pred & (labels == 1)))
        fp = int(np.sum(pred & (labels == 0)))
        fn = int(np.sum(~pred & (labels == 1)))
        assert precision == pytest.approx(tp / (tp + fp), abs=1e-12)
        assert recall == pytest.approx(tp / (tp + fn), abs=1e-12)
    assert np.all(np.diff(c.x) >= 0)


def test_pr_needs_a_positive():
    with pytest.raises(NoPositives):
        pr_curve(np.array([0.1, 0.2]), np.array([0, 0]))


# ---------- thresholded report ----------

def test_report_perfect_split():
    rep = classification_report(np.array([0.9, 0.1]), np.array([1, 0]), threshold=0.5)
    assert (rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0)
    assert not rep.degenerate


def test_report_no_predicted_positives_degenerate():
    rep = classification_report(np.array([0.1, 0.2]), np.array([1, 0]), threshold=0.5)
    assert rep.precision == 0.0 and rep.recall == 0.0 and rep.f1 == 0.0
    assert rep.degenerate
    assert rep.tp + rep.fp + rep.tn + rep.fn == 2


def test_report_counts_against_manual_confusion():
    r = np.random.default_rng(11)
    scores = r.uniform(0, 1, 80)
    labels = r.integers(0, 2, 80)
    rep = classification_report(scores, labels, threshold=0.4)
    pred = scores >= 0.4
    assert rep.tp == int(np.sum(pred & (labels == 1)))
    assert rep.fp == int(np.sum(pred & (labels == 0)))
    assert rep.fn == int(np.sum(~pred & (labels == 1)))
    assert rep.tn == int(np.sum(~pred & (labels == 0)))
    assert rep.auroc == pytest.approx(auroc(scores, labels), abs=1e-12)


def test_report_f1_is_harmonic_mean():
    r = np.random.default_rng(12)
    scores = r.uniform(0, 1, 50)
    labels = r.integers(0, 2, 50)
    rep = classification_report(scores, labels, threshold=0.5)
    if rep.precision + rep.recall > 0:
        want = 2 * rep.precision * rep.recall / (rep.precision + rep.recall)
        assert rep.f1 == pytest.approx(want, abs=1e-12)


# ---------- chance level ----------

def test_random_scores_sit_near_half():
    r = np.random.default_rng(20250816)
    labels = np.array([i % 2 for i in range(339)])
    scores = r.uniform(0, 1, 339)
    a = auroc(scores, labels)
    assert 0.42 <= a <= 0.58
    assert a == pytest.approx(0.4528, abs=5e-4)


# ---------- curve files ----------

def test_curve_csv_round_trip(tmp_path):
    c = roc_curve(np.array([0.9, 0.8, 0.2, 0.1]), np.array([1, 1, 0, 0]))
    path = tmp_path / "roc.csv"
    write_curve_csv(path, c)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "threshold,x,y"
    assert len(rows) == len(c) + 1
    xs = [float(r.split(",")[1]) for r in rows[1:]]
    assert xs == list(c.x)
