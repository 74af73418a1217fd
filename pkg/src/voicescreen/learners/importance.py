"""Additive feature attribution for the linear model.

For a linear score z = beta . x + b, the exact Shapley value of feature j
on row i (with the mean of the explained set as background) is

    phi_ij = beta_j * (x_ij - mean_j)

computed on standardized coordinates. Row attributions therefore sum to
z_i - mean(z) exactly, and a feature's global importance is the mean
absolute attribution across rows.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, InvalidInput, WrongModelKind
from .common import TrainedModel, standardize


def linear_shapley_values(model: TrainedModel, X) -> np.ndarray:
    """Per-row, per-feature attribution matrix for a fitted linear model."""
    if model.kind != "logreg_l1":
        raise WrongModelKind(f"linear attribution needs logreg_l1, got {model.kind}")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} columns, got {X.shape}")
    if X.shape[0] < 1:
        raise InvalidInput("need at least one row to attribute")
    Xs = standardize(X, model.scaler_mean, model.scaler_std)
    return model.params["beta"][None, :] * (Xs - Xs.mean(axis=0, keepdims=True))


def feature_importance(
    model: TrainedModel, X, names: tuple[str, ...] | None = None
) -> list[tuple[str, float]]:
    """Mean |attribution| per feature, sorted descending.

    Ties keep the original feature order. names defaults to f000, f001, ...
    """
    phi = linear_shapley_values(model, X)
    scores = np.abs(phi).mean(axis=0)
    if names is None:
        names = tuple(f"f{j:03d}" for j in range(len(scores)))
    if len(names) != len(scores):
        raise DimensionMismatch("names length must match feature count")
    order = np.argsort(-scores, kind="stable")
    return [(names[j], float(scores[j])) for j in order]
