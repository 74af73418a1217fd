"""Gradient-boosted classification trees with Newton leaf values.

Boosting runs on the logit scale: the model starts from the (clipped)
weighted base-rate log-odds, and each stage fits a small regression tree
to the residuals y - p. Splits greedily maximize weighted variance
reduction of the residuals; leaf values take one Newton step
sum(w*r) / sum(w*p*(1-p)). Ties between equal-gain splits go to the
lowest feature index, then the lowest threshold, so training is fully
deterministic. The weighted training loss after every stage is recorded
and, by construction of the line-search-free small steps, non-increasing
in practice.

The degenerate single-class corpus is allowed: probabilities are clipped
to [1e-6, 1 - 1e-6], residuals vanish, and the model reduces to its
clipped initial score.
"""

from __future__ import annotations

import numpy as np

from .common import (
    FitConfig,
    TrainedModel,
    eval_tree,
    fit_scaler,
    sigmoid,
    standardize,
    validate_training_inputs,
    weighted_logloss,
)

PROB_CLIP = 1e-6
_HESS_FLOOR = 1e-12


def _best_split(Xs: np.ndarray, r: np.ndarray, w: np.ndarray, min_leaf: int):
    """Exhaustive weighted variance-reduction search over all features.

    Returns (gain, feature, threshold) with gain <= 0 meaning no valid
    split. Within a feature the first (lowest-threshold) maximizer wins;
    across features the lowest index wins on ties.
    """
    n, d = Xs.shape
    if n < 2 * min_leaf:
        return 0.0, -1, 0.0
    order = np.argsort(Xs, axis=0, kind="stable")
    xs = np.take_along_axis(Xs, order, axis=0)
    ws = w[order]
    rs = r[order]

    cw = np.cumsum(ws, axis=0)
    cwr = np.cumsum(ws * rs, axis=0)
    tot_w, tot_wr = cw[-1], cwr[-1]

    # Candidate boundaries after sorted position k (left block = first k+1).
    lw, lwr = cw[:-1], cwr[:-1]
    rw, rwr = tot_w - lw, tot_wr - lwr
    # gain = parent SSE - (left SSE + right SSE) collapses to the
    # between-group term: sum of (block mean)^2 * block weight - parent term.
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = lwr**2 / lw + rwr**2 / rw - tot_wr**2 / tot_w

    counts = np.arange(1, n)[:, None]
    valid = (xs[1:] > xs[:-1]) & (counts >= min_leaf) & (n - counts >= min_leaf)
    gain = np.where(valid & (rw > 0) & (lw > 0), gain, -np.inf)

    best_pos = np.argmax(gain, axis=0)
    best_gain = gain[best_pos, np.arange(d)]
    j = int(np.argmax(best_gain))
    if not np.isfinite(best_gain[j]) or best_gain[j] <= 1e-12:
        return 0.0, -1, 0.0
    k = int(best_pos[j])
    threshold = 0.5 * (xs[k, j] + xs[k + 1, j])
    return float(best_gain[j]), j, float(threshold)


def _build_tree(Xs, r, w, hess, depth, cfg: FitConfig) -> dict:
    gain, feature, threshold = (0.0, -1, 0.0)
    if depth < cfg.max_depth:
        gain, feature, threshold = _best_split(Xs, r, w, cfg.min_leaf)
    if feature < 0 or gain <= 0.0:
        denom = max(float(hess.sum()), _HESS_FLOOR)
        return {"value": float((w * r).sum() / denom)}
    left = Xs[:, feature] <= threshold
    return {
        "feature": int(feature),
        "threshold": float(threshold),
        "left": _build_tree(Xs[left], r[left], w[left], hess[left], depth + 1, cfg),
        "right": _build_tree(Xs[~left], r[~left], w[~left], hess[~left], depth + 1, cfg),
    }


def fit_gbc(X, y, w=None, config: FitConfig | None = None) -> TrainedModel:
    cfg = config or FitConfig()
    X, y, w = validate_training_inputs(X, y, w, require_both_classes=False)
    mean, std = fit_scaler(X)
    Xs = standardize(X, mean, std)

    p_bar = float(np.clip((w * y).sum() / w.sum(), PROB_CLIP, 1.0 - PROB_CLIP))
    init_score = float(np.log(p_bar / (1.0 - p_bar)))
    z = np.full(len(Xs), init_score)
    loss_path = [weighted_logloss(z, y, w)]

    trees: list[dict] = []
    for _ in range(cfg.n_trees):
        p = np.clip(sigmoid(z), PROB_CLIP, 1.0 - PROB_CLIP)
        r = y - p
        hess = w * p * (1.0 - p)
        tree = _build_tree(Xs, r, w, hess, 0, cfg)
        trees.append(tree)
        z = z + cfg.learning_rate * eval_tree(tree, Xs)
        loss_path.append(weighted_logloss(z, y, w))

    return TrainedModel(
        kind="gbc",
        scaler_mean=mean,
        scaler_std=std,
        params={
            "init_score": init_score,
            "learning_rate": cfg.learning_rate,
            "trees": trees,
            "train_loss_path": np.asarray(loss_path),
        },
        config=cfg,
    )
