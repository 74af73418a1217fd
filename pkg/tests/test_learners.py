"""The three from-scratch classifiers and their shared persistence layer."""

import numpy as np
import pytest

from voicescreen.errors import (
    DimensionMismatch,
    InvalidInput,
    MalformedLine,
    NonpositiveWeight,
    SingleClass,
    WrongModelKind,
)
from voicescreen.learners import (
    FitConfig,
    TrainedModel,
    feature_importance,
    fit_gbc,
    fit_logreg_l1,
    fit_svm_rbf,
    l1_lambda_max,
    linear_shapley_values,
    load_model,
    predict_scores,
    save_model,
)
from voicescreen.learners.common import fit_scaler, sigmoid, weighted_logloss
from voicescreen.metrics import auroc

rng = np.random.default_rng(0)


# ---------- sparse logistic regression ----------

def test_logreg_separable_perfect():
    X = np.concatenate([np.full((10, 1), -1.0), np.full((10, 1), 1.0)])
    y = np.concatenate([np.zeros(10), np.ones(10)])
    m = fit_logreg_l1(X, y, config=FitConfig(l1_lambda=1e-6))
    assert (((predict_scores(m, X) >= 0.5) == y)).all()


def test_logreg_lambda_max_zeroes_coefficients():
    r = np.random.default_rng(1)
    X = r.standard_normal((30, 4))
    y = (X[:, 0] + 0.3 * r.standard_normal(30) > 0).astype(float)
    lmax = l1_lambda_max(X, y)
    at = fit_logreg_l1(X, y, config=FitConfig(l1_lambda=lmax * 1.0001))
    assert np.all(at.params["beta"] == 0.0)
    below = fit_logreg_l1(X, y, config=FitConfig(l1_lambda=lmax * 0.5))
    assert np.any(below.params["beta"] != 0.0)


def test_logreg_gradient_matches_central_differences():
    r = np.random.default_rng(2)
    X = r.standard_normal((20, 5))
    y = r.integers(0, 2, 20).astype(float)
    w = r.uniform(0.5, 2.0, 20)
    mean, std = fit_scaler(X)
    Xs = (X - mean) / std
    beta = r.standard_normal(5) * 0.3
    b = 0.1

    def loss(beta_, b_):
        return weighted_logloss(Xs @ beta_ + b_, y, w)

    eps = 1e-5
    fd = np.empty(5)
    for j in range(5):
        e = np.zeros(5)
        e[j] = eps
        fd[j] = (loss(beta + e, b) - loss(beta - e, b)) / (2 * eps)
    p = sigmoid(Xs @ beta + b)
    analytic = Xs.T @ (w * (p - y)) / w.sum()
    rel = np.abs(fd - analytic).max() / np.abs(analytic).max()
    assert rel < 1e-5


def test_logreg_duplicate_row_equals_double_weight():
    r = np.random.default_rng(3)
    X = r.standard_normal((8, 3))
    y = r.integers(0, 2, 8).astype(float)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    beta = r.standard_normal(3)
    Xdup = np.concatenate([X, X[:1]])
    ydup = np.concatenate([y, y[:1]])
    mean, std = fit_scaler(Xdup)
    z_dup = ((Xdup - mean) / std) @ beta + 0.1
    z_w = ((X - mean) / std) @ beta + 0.1
    w = np.ones(8)
    w[0] = 2.0
    assert weighted_logloss(z_dup, ydup, np.ones(9)) == pytest.approx(
        weighted_logloss(z_w, y, w), abs=1e-12
    )


def test_logreg_affine_feature_invariance():
    r = np.random.default_rng(4)
    X = r.standard_normal((40, 3))
    y = (X[:, 1] > 0.2).astype(float)
    X2 = X.copy()
    X2[:, 1] = 5.0 * X2[:, 1] + 3.0
    a = fit_logreg_l1(X, y, config=FitConfig(l1_lambda=1e-3))
    b = fit_logreg_l1(X2, y, config=FitConfig(l1_lambda=1e-3))
    assert auroc(predict_scores(a, X), y) == pytest.approx(
        auroc(predict_scores(b, X2), y), abs=1e-6
    )


def test_logreg_probability_range_and_zero_model():
    m = TrainedModel(
        "logreg_l1", np.zeros(2), np.ones(2), {"beta": np.zeros(2), "intercept": 0.0}
    )
    s = predict_scores(m, rng.standard_normal((5, 2)))
    assert np.all(s == 0.5)


def test_logreg_single_class_raises():
    X = rng.standard_normal((10, 2))
    with pytest.raises(SingleClass):
        fit_logreg_l1(X, np.zeros(10))


def test_logreg_deterministic():
    r = np.random.default_rng(5)
    X = r.standard_normal((25, 4))
    y = (X[:, 0] > 0).astype(float)
    a = fit_logreg_l1(X, y)
    b = fit_logreg_l1(X, y)
    assert np.array_equal(a.params["beta"], b.params["beta"])
    assert a.params["intercept"] == b.params["intercept"]


# ---------- kernel SVM ----------

def test_svm_solves_xor():
    X = np.array([[0.0, 0], [1, 1], [0, 1], [1, 0]])
    y = np.array([0.0, 0, 1, 1])
    m = fit_svm_rbf(X, y, config=FitConfig(C=10.0, gamma=1.0))
    assert (((predict_scores(m, X) >= 0) == y)).all()


def test_svm_symmetric_midpoint_is_zero():
    m = fit_svm_rbf(
        np.array([[-1.0], [1.0]]), np.array([0.0, 1.0]),
        config=FitConfig(C=10.0, gamma=1.0),
    )
    assert predict_scores(m, np.array([[0.0]]))[0] == pytest.approx(0.0, abs=1e-6)


def test_svm_dual_feasibility_and_kkt():
    worst_gap = 0.0
    for trial in range(5):
        r = np.random.default_rng(trial)
        X = r.standard_normal((30, 3))
        y = (X[:, 0] + 0.5 * r.standard_normal(30) > 0).astype(float)
        if y.min() == y.max():
            continue
        w = r.uniform(0.5, 1.5, 30)
        m = fit_svm_rbf(X, y, w, config=FitConfig(C=10.0))
        alpha = np.abs(m.params["dual_coef"])
        box = m.config.C * w[m.params["support_idx"]]
        assert np.all(alpha <= box + 1e-9)
        # the signed coefficients already carry y, so they sum to zero
        assert np.sum(m.params["dual_coef"]) == pytest.approx(0.0, abs=1e-6)
        worst_gap = max(worst_gap, m.params["kkt_gap"])
    assert worst_gap <= 1e-3


def test_svm_default_gamma_from_training_scale():
    r = np.random.default_rng(6)
    X = r.standard_normal((20, 4))
    y = (X[:, 0] > 0).astype(float)
    m = fit_svm_rbf(X, y)
    # standardized columns have unit variance, so the heuristic lands at 1/d
    assert m.params["gamma"] == pytest.approx(1.0 / 4.0, rel=0.05)


def test_svm_single_class_raises():
    with pytest.raises(SingleClass):
        fit_svm_rbf(rng.standard_normal((6, 2)), np.ones(6))


# ---------- gradient boosting ----------

def test_gbc_threshold_problem():
    X = np.linspace(-1, 1, 50).reshape(-1, 1)
    y = (X[:, 0] >= 0).astype(float)
    m = fit_gbc(X, y, config=FitConfig(n_trees=10))
    assert (((predict_scores(m, X) >= 0.5) == y)).all()


def test_gbc_training_loss_never_increases():
    X = np.linspace(-1, 1, 50).reshape(-1, 1)
    y = (X[:, 0] >= 0).astype(float)
    m = fit_gbc(X, y, config=FitConfig(n_trees=10))
    assert np.all(np.diff(m.params["train_loss_path"]) <= 1e-12)


def test_gbc_single_class_allowed():
    X = np.linspace(-1, 1, 50).reshape(-1, 1)
    m = fit_gbc(X, np.ones(50), config=FitConfig(n_trees=5))
    assert np.all(predict_scores(m, X) >= 0.999)


def test_gbc_zero_trees_is_prevalence():
    X = np.linspace(-1, 1, 50).reshape(-1, 1)
    y = (X[:, 0] >= 0).astype(float)
    m = fit_gbc(X, y, config=FitConfig(n_trees=0))
    p = predict_scores(m, X)
    assert np.allclose(p, 0.5, atol=1e-9)


def test_gbc_stumps_still_solve_threshold():
    X = np.linspace(-1, 1, 60).reshape(-1, 1)
    y = (X[:, 0] >= 0.2).astype(float)
    m = fit_gbc(X, y, config=FitConfig(n_trees=20, max_depth=1))
    assert (((predict_scores(m, X) >= 0.5) == y)).all()


def test_gbc_weights_move_the_fit():
    r = np.random.default_rng(7)
    X = r.standard_normal((40, 2))
    y = (X[:, 0] > 0).astype(float)
    w = np.where(y == 1, 5.0, 1.0)
    a = fit_gbc(X, y, config=FitConfig(n_trees=5))
    b = fit_gbc(X, y, w, config=FitConfig(n_trees=5))
    assert not np.allclose(predict_scores(a, X), predict_scores(b, X))


# ---------- shared input contract ----------

def test_fit_config_validation():
    for bad in (
        {"l1_lambda": -1.0},
        {"tol": 0.0},
        {"max_iter": 0},
        {"C": 0.0},
        {"gamma": -2.0},
        {"n_trees": -1},
        {"learning_rate": 0.0},
        {"max_depth": 0},
        {"min_leaf": 0},
    ):
        with pytest.raises(InvalidInput):
            FitConfig(**bad)


def test_nonpositive_weights_rejected():
    X = np.array([[0.0], [1.0]])
    y = np.array([0.0, 1.0])
    with pytest.raises(NonpositiveWeight):
        fit_logreg_l1(X, y, np.array([1.0, 0.0]))


def test_predict_dimension_mismatch():
    X = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.2], [0.1, 0.9]])
    y = np.array([0.0, 1.0, 0.0, 1.0])
    m = fit_logreg_l1(X, y)
    with pytest.raises(DimensionMismatch):
        predict_scores(m, np.zeros((3, 5)))


def test_labels_must_be_binary():
    with pytest.raises(InvalidInput):
        fit_logreg_l1(np.zeros((4, 1)), np.array([0.0, 1.0, 2.0, 1.0]))


# ---------- persistence ----------

@pytest.mark.parametrize("fitter", [fit_logreg_l1, fit_svm_rbf, fit_gbc])
def test_save_load_scores_bit_identical(tmp_path, fitter):
    r = np.random.default_rng(8)
    X = r.standard_normal((30, 3))
    y = (X[:, 0] + 0.3 * r.standard_normal(30) > 0).astype(float)
    m = fitter(X, y)
    path = tmp_path / "model.json"
    save_model(path, m)
    back = load_model(path)
    assert back.kind == m.kind
    assert np.array_equal(predict_scores(back, X), predict_scores(m, X))


def test_load_rejects_foreign_document(tmp_path):
    p = tmp_path / "model.json"
    p.write_text('{"kind": "mystery"}')
    with pytest.raises(MalformedLine):
        load_model(p)
    p.write_text("not json at all")
    with pytest.raises(MalformedLine):
        load_model(p)


# ---------- attribution ----------

def test_shapley_linear_formula():
    m = TrainedModel(
        "logreg_l1", np.zeros(2), np.ones(2),
        {"beta": np.array([2.0, 0.0]), "intercept": 0.0},
    )
    X = np.array([[3.0, 7.0], [-1.0, 3.0]])
    phi = linear_shapley_values(m, X)
    assert np.allclose(phi[0], [4.0, 0.0])
    # rows reconstruct the centered margin exactly
    margins = X @ np.array([2.0, 0.0])
    assert np.allclose(phi.sum(axis=1), margins - margins.mean())


def test_feature_importance_ranks_by_magnitude():
    m = TrainedModel(
        "logreg_l1", np.zeros(2), np.ones(2),
        {"beta": np.array([2.0, 0.0]), "intercept": 0.0},
    )
    X = np.array([[3.0, 7.0], [-1.0, 3.0]])
    imp = feature_importance(m, X, names=("a", "b"))
    assert imp[0][0] == "a" and imp[1][1] == 0.0


def test_shapley_requires_linear_model():
    X = np.array([[0.0, 0], [1, 1], [0, 1], [1, 0]])
    y = np.array([0.0, 0, 1, 1])
    m = fit_svm_rbf(X, y, config=FitConfig(gamma=1.0))
    with pytest.raises(WrongModelKind):
        linear_shapley_values(m, X)
