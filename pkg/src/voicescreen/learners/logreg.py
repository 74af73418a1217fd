"""L1-penalized logistic regression via proximal gradient descent.

Objective on the standardized design matrix:

    f(beta, b) = (1/sum w) * sum_i w_i * logloss_i  +  lambda * ||beta||_1

The smooth part is minimized with gradient steps followed by
soft-thresholding of beta (the intercept is never penalized); a
backtracking line search keeps the surrogate majorizing, so the
objective is non-increasing. Standardization makes the penalty scale
comparable across features, and constant columns (standardized to zero)
can never enter the model.
"""

from __future__ import annotations

import numpy as np

from .common import (
    FitConfig,
    TrainedModel,
    fit_scaler,
    sigmoid,
    standardize,
    validate_training_inputs,
    weighted_logloss,
)


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def l1_lambda_max(X, y, w=None) -> float:
    """Smallest penalty that zeroes every coefficient.

    With beta = 0 the optimal intercept gives p_i = weighted base rate,
    so the coefficient subgradient condition is
    max_j |(1/sum w) sum_i w_i x_ij (y_i - ybar_w)| <= lambda.
    Computed on the standardized matrix, matching fit_logreg_l1.
    """
    X, y, w = validate_training_inputs(X, y, w)
    mean, std = fit_scaler(X)
    Xs = standardize(X, mean, std)
    ybar = float((w * y).sum() / w.sum())
    grad0 = Xs.T @ (w * (y - ybar)) / w.sum()
    return float(np.abs(grad0).max())


def fit_logreg_l1(X, y, w=None, config: FitConfig | None = None) -> TrainedModel:
    cfg = config or FitConfig()
    X, y, w = validate_training_inputs(X, y, w)
    mean, std = fit_scaler(X)
    Xs = standardize(X, mean, std)
    n, d = Xs.shape
    wsum = w.sum()
    lam = cfg.l1_lambda

    beta = np.zeros(d)
    intercept = 0.0

    def smooth(b_vec, b0):
        return weighted_logloss(Xs @ b_vec + b0, y, w)

    def grads(b_vec, b0):
        p = sigmoid(Xs @ b_vec + b0)
        resid = w * (p - y)
        return Xs.T @ resid / wsum, float(resid.sum() / wsum)

    loss = smooth(beta, intercept)
    objective = loss + lam * np.abs(beta).sum()
    step = 1.0
    n_iter = 0
    for n_iter in range(1, cfg.max_iter + 1):
        g_beta, g_b = grads(beta, intercept)
        while True:
            beta_new = soft_threshold(beta - step * g_beta, step * lam)
            b_new = intercept - step * g_b
            d_beta = beta_new - beta
            d_b = b_new - intercept
            quad = (
                loss
                + g_beta @ d_beta
                + g_b * d_b
                + ((d_beta @ d_beta) + d_b * d_b) / (2.0 * step)
            )
            loss_new = smooth(beta_new, b_new)
            if loss_new <= quad + 1e-15 or step < 1e-12:
                break
            step *= 0.5
        beta, intercept, loss = beta_new, b_new, loss_new
        new_objective = loss + lam * np.abs(beta).sum()
        if objective - new_objective < cfg.tol:
            objective = new_objective
            break
        objective = new_objective
        step = min(step * 1.5, 1.0e3)

    return TrainedModel(
        kind="logreg_l1",
        scaler_mean=mean,
        scaler_std=std,
        params={
            "beta": beta,
            "intercept": float(intercept),
            "n_iter": n_iter,
            "objective": float(objective),
        },
        config=cfg,
    )
