"""Regression models over dataset rows: linear, ridge, k-NN, and baseline.

Linear and ridge center features and targets, solve for the weight matrix,
and fold the means into the bias, so prediction is a plain affine map.
k-NN stores the training rows verbatim and averages the k nearest targets
at query time.  The baseline predicts the training-target mean everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import InsufficientDataError, InvalidParameterError, ShapeError
from .numerics import DEFAULT_RCOND, lstsq_min_norm, ridge_solve


@dataclass
class LinearModel:
    weights: np.ndarray  # (p, k)
    bias: np.ndarray  # (k,)
    feature_means: np.ndarray  # (p,)
    target_means: np.ndarray  # (k,)


@dataclass
class RidgeModel(LinearModel):
    alpha: float = 0.0


@dataclass
class KnnModel:
    k: int
    features: np.ndarray  # (n, p) stored training rows
    targets: np.ndarray  # (n, k)


@dataclass
class BaselineModel:
    constant_prediction: np.ndarray  # (k,)


def _training_arrays(train: Dataset):
    x = np.asarray(train.features, dtype=np.float64)
    y = np.asarray(train.targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ShapeError(f"bad training shapes {x.shape} / {y.shape}")
    return x, y


def fit_linear(train: Dataset, rcond: float = DEFAULT_RCOND) -> LinearModel:
    """Minimum-norm least squares on centered features and targets."""
    x, y = _training_arrays(train)
    if x.shape[0] < 2:
        raise InsufficientDataError(
            f"linear fit needs at least 2 rows, got {x.shape[0]}"
        )
    xm = x.mean(axis=0)
    ym = y.mean(axis=0)
    w = lstsq_min_norm(x - xm, y - ym, rcond)
    return LinearModel(weights=w, bias=ym - xm @ w, feature_means=xm, target_means=ym)


def fit_ridge(train: Dataset, alpha: float) -> RidgeModel:
    """Closed-form ridge on centered data; the bias is not penalized."""
    x, y = _training_arrays(train)
    if x.shape[0] < 2:
        raise InsufficientDataError(
            f"ridge fit needs at least 2 rows, got {x.shape[0]}"
        )
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be > 0, got {alpha!r}")
    xm = x.mean(axis=0)
    ym = y.mean(axis=0)
    w = ridge_solve(x - xm, y - ym, alpha)
    return RidgeModel(
        weights=w, bias=ym - xm @ w, feature_means=xm, target_means=ym, alpha=alpha
    )


def fit_knn(train: Dataset, k: int) -> KnnModel:
    """Store the rows verbatim; all computation happens at query time."""
    x, y = _training_arrays(train)
    if not 1 <= k <= x.shape[0]:
        raise InvalidParameterError(
            f"k must lie in [1, {x.shape[0]}], got {k}"
        )
    return KnnModel(k=int(k), features=x.copy(), targets=y.copy())


def fit_baseline(train: Dataset) -> BaselineModel:
    """Constant predictor: the componentwise mean of the training targets."""
    _, y = _training_arrays(train)
    if y.shape[0] < 1:
        raise InsufficientDataError("baseline fit needs at least 1 row")
    return BaselineModel(constant_prediction=y.mean(axis=0))


def _feature_dim(model) -> int | None:
    if isinstance(model, LinearModel):
        return model.weights.shape[0]
    if isinstance(model, KnnModel):
        return model.features.shape[1]
    return None  # baseline accepts any length


def predict(model, features) -> np.ndarray:
    """Predict the target vector for one feature vector."""
    q = np.asarray(features, dtype=np.float64)
    if q.ndim != 1:
        raise ShapeError(f"features must be a vector, got shape {q.shape}")
    dim = _feature_dim(model)
    if dim is not None and q.size != dim:
        raise ShapeError(f"feature length {q.size} does not match model ({dim})")
    if isinstance(model, LinearModel):
        return q @ model.weights + model.bias
    if isinstance(model, KnnModel):
        diff = model.features - q
        dist = np.sqrt((diff * diff).sum(axis=1))
        order = np.argsort(dist, kind="stable")  # ties: lower row index first
        return model.targets[order[: model.k]].mean(axis=0)
    if isinstance(model, BaselineModel):
        return model.constant_prediction.copy()
    raise InvalidParameterError(f"unknown model type {type(model).__name__}")


def predict_batch(model, features) -> np.ndarray:
    """Predict for each row of a feature matrix."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"features must be a matrix, got shape {x.shape}")
    dim = _feature_dim(model)
    if dim is not None and x.shape[1] != dim:
        raise ShapeError(f"feature length {x.shape[1]} does not match model ({dim})")
    if isinstance(model, LinearModel):
        return x @ model.weights + model.bias
    if isinstance(model, (KnnModel, BaselineModel)):
        return np.array([predict(model, row) for row in x])
    raise InvalidParameterError(f"unknown model type {type(model).__name__}")


def mse(predictions, truth) -> float:
    """Mean over samples of the squared Euclidean distance to the truth."""
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.ndim != 2 or p.shape != t.shape or p.shape[0] < 1:
        raise ShapeError(f"prediction/truth shapes differ or are empty: {p.shape} vs {t.shape}")
    d = p - t
    return float((d * d).sum() / p.shape[0])
