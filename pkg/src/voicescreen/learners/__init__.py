"""Weighted binary classifiers built on numpy: sparse logistic regression,
RBF support vector machine, and gradient-boosted trees, with a shared
scaler/serialization layer and score-based prediction."""

from .common import (
    MODEL_FORMAT,
    MODEL_KINDS,
    FitConfig,
    TrainedModel,
    load_model,
    predict_scores,
    save_model,
)
from .gbc import fit_gbc
from .importance import feature_importance, linear_shapley_values
from .logreg import fit_logreg_l1, l1_lambda_max
from .svm import fit_svm_rbf

__all__ = [
    "MODEL_FORMAT",
    "MODEL_KINDS",
    "FitConfig",
    "TrainedModel",
    "load_model",
    "predict_scores",
    "save_model",
    "fit_gbc",
    "feature_importance",
    "linear_shapley_values",
    "fit_logreg_l1",
    "l1_lambda_max",
    "fit_svm_rbf",
]
