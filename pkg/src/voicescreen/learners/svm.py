"""RBF-kernel support vector classifier trained by SMO on the dual.

Two-variable subproblems are chosen by the max-violating-pair rule and
solved in closed form with box clipping; the dual gradient is kept
incrementally. Per-sample weights scale the box: 0 <= alpha_i <= C * w_i,
so heavier samples may carry proportionally larger dual mass. Training
stops when the KKT gap m(alpha) - M(alpha) drops below kkt_tol.
"""

from __future__ import annotations

import numpy as np

from .common import (
    FitConfig,
    TrainedModel,
    fit_scaler,
    standardize,
    validate_training_inputs,
)

_TAU = 1e-12
SUPPORT_EPS = 1e-12


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A**2).sum(axis=1)[:, None] - 2.0 * A @ B.T + (B**2).sum(axis=1)[None, :]
    return np.exp(-gamma * np.maximum(sq, 0.0))


def default_gamma(Xs: np.ndarray) -> float:
    """1 / (n_features * mean feature variance) on the standardized matrix."""
    var = Xs.var(axis=0).mean()
    if var <= 0:
        return 1.0 / Xs.shape[1]
    return 1.0 / (Xs.shape[1] * var)


def smo_solve(K: np.ndarray, y_pm: np.ndarray, c_box: np.ndarray, kkt_tol: float, max_iter: int):
    """Minimize (1/2) a'Qa - 1'a s.t. 0 <= a <= c_box, with Q = yy' * K.

    Returns (alpha, intercept, kkt_gap, n_iter).
    """
    n = len(y_pm)
    Q = (y_pm[:, None] * y_pm[None, :]) * K
    alpha = np.zeros(n)
    G = -np.ones(n)

    at_upper = alpha >= c_box - SUPPORT_EPS
    at_lower = alpha <= SUPPORT_EPS
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        yG = y_pm * G
        up = ((y_pm > 0) & ~at_upper) | ((y_pm < 0) & ~at_lower)
        low = ((y_pm > 0) & ~at_lower) | ((y_pm < 0) & ~at_upper)
        up_vals = np.where(up, -yG, -np.inf)
        low_vals = np.where(low, -yG, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        gap = up_vals[i] - low_vals[j]
        if not np.isfinite(gap) or gap <= kkt_tol:
            gap = max(gap, 0.0) if np.isfinite(gap) else 0.0
            break

        ci, cj = c_box[i], c_box[j]
        ai_old, aj_old = alpha[i], alpha[j]
        if y_pm[i] != y_pm[j]:
            quad = max(Q[i, i] + Q[j, j] + 2.0 * Q[i, j], _TAU)
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            else:
                if ai < 0:
                    ai, aj = 0.0, -diff
            if diff > ci - cj:
                if ai > ci:
                    ai, aj = ci, ci - diff
            else:
                if aj > cj:
                    aj, ai = cj, cj + diff
        else:
            quad = max(Q[i, i] + Q[j, j] - 2.0 * Q[i, j], _TAU)
            delta = (G[i] - G[j]) / quad
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > ci:
                if ai > ci:
                    ai, aj = ci, total - ci
            else:
                if aj < 0:
                    aj, ai = 0.0, total
            if total > cj:
                if aj > cj:
                    aj, ai = cj, total - cj
            else:
                if ai < 0:
                    ai, aj = 0.0, total

        d_i, d_j = ai - ai_old, aj - aj_old
        alpha[i], alpha[j] = ai, aj
        G += Q[:, i] * d_i + Q[:, j] * d_j
        at_upper[i] = ai >= ci - SUPPORT_EPS
        at_lower[i] = ai <= SUPPORT_EPS
        at_upper[j] = aj >= cj - SUPPORT_EPS
        at_lower[j] = aj <= SUPPORT_EPS

    yG = y_pm * G
    free = ~at_upper & ~at_lower
    if free.any():
        rho = float(yG[free].mean())
    else:
        ub = np.inf
        lb = -np.inf
        upper_pos = at_upper & (y_pm > 0)
        upper_neg = at_upper & (y_pm < 0)
        lower_pos = at_lower & (y_pm > 0)
        lower_neg = at_lower & (y_pm < 0)
        for mask, is_ub in ((upper_neg, True), (lower_pos, True), (upper_pos, False), (lower_neg, False)):
            if mask.any():
                if is_ub:
                    ub = min(ub, float(yG[mask].min()))
                else:
                    lb = max(lb, float(yG[mask].max()))
        rho = (ub + lb) / 2.0 if np.isfinite(ub) and np.isfinite(lb) else 0.0
    return alpha, -rho, float(gap), it


def fit_svm_rbf(X, y, w=None, config: FitConfig | None = None) -> TrainedModel:
    cfg = config or FitConfig()
    X, y, w = validate_training_inputs(X, y, w)
    mean, std = fit_scaler(X)
    Xs = standardize(X, mean, std)
    n = len(Xs)

    gamma = cfg.gamma if cfg.gamma is not None else default_gamma(Xs)
    y_pm = np.where(y == 1, 1.0, -1.0)
    c_box = cfg.C * w
    K = rbf_kernel(Xs, Xs, gamma)
    max_iter = max(cfg.max_iter, 100 * n)
    alpha, intercept, gap, n_iter = smo_solve(K, y_pm, c_box, cfg.kkt_tol, max_iter)

    support = np.where(alpha > SUPPORT_EPS)[0]
    return TrainedModel(
        kind="svm_rbf",
        scaler_mean=mean,
        scaler_std=std,
        params={
            "support_vectors": Xs[support].copy(),
            "dual_coef": alpha[support] * y_pm[support],
            "intercept": float(intercept),
            "gamma": float(gamma),
            "support_idx": [int(i) for i in support],
            "kkt_gap": gap,
            "n_iter": int(n_iter),
        },
        config=cfg,
    )
