"""Shared training infrastructure: config, scaling, model container, scoring."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import (
    DimensionMismatch,
    InvalidInput,
    MalformedLine,
    NonFiniteValue,
    NonpositiveWeight,
    SingleClass,
    WrongModelKind,
)

MODEL_FORMAT = "voicescreen-model-v1"
MODEL_KINDS = ("logreg_l1", "svm_rbf", "gbc")


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters for all three learner families.

    gamma=None means the RBF width is set from the data as
    1 / (n_features * mean feature variance) of the standardized matrix.
    """

    l1_lambda: float = 1e-3
    tol: float = 1e-8
    max_iter: int = 10_000
    C: float = 10.0
    gamma: float | None = None
    kkt_tol: float = 1e-3
    n_trees: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.l1_lambda < 0:
            raise InvalidInput("l1_lambda must be >= 0")
        if self.tol <= 0 or self.max_iter < 1:
            raise InvalidInput("need tol > 0 and max_iter >= 1")
        if self.C <= 0 or self.kkt_tol <= 0:
            raise InvalidInput("need C > 0 and kkt_tol > 0")
        if self.gamma is not None and self.gamma <= 0:
            raise InvalidInput("gamma must be positive when given")
        if self.n_trees < 0 or self.learning_rate <= 0:
            raise InvalidInput("need n_trees >= 0 and learning_rate > 0")
        if self.max_depth < 1 or self.min_leaf < 1:
            raise InvalidInput("need max_depth >= 1 and min_leaf >= 1")


@dataclass(frozen=True)
class TrainedModel:
    """A fitted classifier: kind tag, training scaler, kind-specific params."""

    kind: str
    scaler_mean: np.ndarray
    scaler_std: np.ndarray
    params: dict
    config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidInput(f"unknown model kind {self.kind!r}")
        if self.scaler_mean.shape != self.scaler_std.shape:
            raise InvalidInput("scaler arrays must align")

    @property
    def n_features(self) -> int:
        return len(self.scaler_mean)


def validate_training_inputs(X, y, w, require_both_classes: bool = True):
    """Common checks; returns (X, y, w) as float64/int arrays, w defaulted to 1."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise InvalidInput("X must be a 2-d matrix")
    n, d = X.shape
    if n < 2 or d < 1:
        raise InvalidInput("need at least two rows and one feature")
    if not np.all(np.isfinite(X)):
        raise NonFiniteValue("X contains non-finite values")
    if y.shape != (n,):
        raise DimensionMismatch(f"y length {y.shape} != {n}")
    y = y.astype(np.int64)
    if not np.all((y == 0) | (y == 1)):
        raise InvalidInput("labels must be 0/1")
    if require_both_classes and (y.min() == y.max()):
        raise SingleClass("training labels contain a single class")
    if w is None:
        w = np.ones(n)
    else:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (n,):
            raise DimensionMismatch(f"weights length {w.shape} != {n}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise NonpositiveWeight("sample weights must be finite and > 0")
    return X, y, w


def fit_scaler(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column mean and population std; constant columns get std 1 so they
    standardize to exactly zero and stay inert downstream."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


def standardize(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (X - mean) / std


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def weighted_logloss(z: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    """Mean weighted cross-entropy of logits z against 0/1 labels."""
    return float((w * (np.logaddexp(0.0, z) - y * z)).sum() / w.sum())


def predict_scores(model: TrainedModel, X) -> np.ndarray:
    """Scores for ranking/thresholding.

    logreg_l1 and gbc return probabilities in (0, 1); svm_rbf returns the
    signed margin. Input columns must match the training dimension.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"expected {model.n_features} columns, got {X.shape}"
        )
    if not np.all(np.isfinite(X)):
        raise NonFiniteValue("X contains non-finite values")
    Xs = standardize(X, model.scaler_mean, model.scaler_std)
    p = model.params
    if model.kind == "logreg_l1":
        return sigmoid(Xs @ p["beta"] + p["intercept"])
    if model.kind == "svm_rbf":
        sq = (
            (Xs**2).sum(axis=1)[:, None]
            - 2.0 * Xs @ p["support_vectors"].T
            + (p["support_vectors"] ** 2).sum(axis=1)[None, :]
        )
        K = np.exp(-p["gamma"] * np.maximum(sq, 0.0))
        return K @ p["dual_coef"] + p["intercept"]
    if model.kind == "gbc":
        z = np.full(len(Xs), p["init_score"])
        for tree in p["trees"]:
            z += p["learning_rate"] * eval_tree(tree, Xs)
        return sigmoid(z)
    raise WrongModelKind(model.kind)


def eval_tree(node: dict, Xs: np.ndarray) -> np.ndarray:
    """Evaluate one regression tree (nested-dict form) on standardized rows."""
    out = np.empty(len(Xs))
    stack = [(node, np.arange(len(Xs)))]
    while stack:
        nd, idx = stack.pop()
        if "value" in nd:
            out[idx] = nd["value"]
            continue
        go_left = Xs[idx, nd["feature"]] <= nd["threshold"]
        stack.append((nd["left"], idx[go_left]))
        stack.append((nd["right"], idx[~go_left]))
    return out


def _to_jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    return value


def save_model(path, model: TrainedModel) -> None:
    """Serialize to versioned JSON; floats keep full repr precision."""
    doc = {
        "format": MODEL_FORMAT,
        "kind": model.kind,
        "scaler_mean": model.scaler_mean.tolist(),
        "scaler_std": model.scaler_std.tolist(),
        "params": _to_jsonable(model.params),
        "config": asdict(model.config),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


_ARRAY_PARAMS = {
    "logreg_l1": ("beta",),
    "svm_rbf": ("support_vectors", "dual_coef"),
    "gbc": ("train_loss_path",),
}


def load_model(path) -> TrainedModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"{path}: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise MalformedLine(f"{path}: not a {MODEL_FORMAT} document")
    kind = doc.get("kind")
    if kind not in MODEL_KINDS:
        raise MalformedLine(f"{path}: unknown kind {kind!r}")
    params = doc["params"]
    for key in _ARRAY_PARAMS[kind]:
        params[key] = np.asarray(params[key], dtype=np.float64)
    return TrainedModel(
        kind=kind,
        scaler_mean=np.asarray(doc["scaler_mean"], dtype=np.float64),
        scaler_std=np.asarray(doc["scaler_std"], dtype=np.float64),
        params=params,
        config=FitConfig(**doc.get("config", {})),
    )
