"""JSON persistence for all fitted models.

One schema for every model type: model_type tag, hyperparameters, weight
arrays (row-major nested lists, written as round-trip decimals), and a
training-provenance block (dataset kind, split seed/ratio, feature layout)
that lets evaluation reconstruct the exact test split.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ModelParseError
from .estimators import BaselineModel, KnnModel, LinearModel, RidgeModel
from .neural import HIDDEN_ACTIVATION, OUTPUT_ACTIVATION, MlpModel

LINEAR = "linear"
RIDGE = "ridge"
KNN = "knn"
BASELINE = "baseline"
MLP = "mlp"

MODEL_TYPES = (LINEAR, RIDGE, KNN, BASELINE, MLP)


def model_type_of(model) -> str:
    if isinstance(model, RidgeModel):
        return RIDGE
    if isinstance(model, LinearModel):
        return LINEAR
    if isinstance(model, KnnModel):
        return KNN
    if isinstance(model, BaselineModel):
        return BASELINE
    if isinstance(model, MlpModel):
        return MLP
    raise ModelParseError(f"unknown model object {type(model).__name__}")


def _encode(model) -> tuple[dict, dict]:
    kind = model_type_of(model)
    if kind == RIDGE:
        hyper = {"alpha": model.alpha}
    elif kind == KNN:
        hyper = {"k": model.k}
    elif kind == MLP:
        hyper = {
            "layer_sizes": list(model.layer_sizes),
            "activations": [HIDDEN_ACTIVATION] * (model.n_layers - 1) + [OUTPUT_ACTIVATION],
            "target_scaling": [list(pair) for pair in (model.target_scaling or [])],
        }
    else:
        hyper = {}
    if kind in (LINEAR, RIDGE):
        weights = {
            "weights": model.weights.tolist(),
            "bias": model.bias.tolist(),
            "feature_means": model.feature_means.tolist(),
            "target_means": model.target_means.tolist(),
        }
    elif kind == KNN:
        weights = {
            "features": model.features.tolist(),
            "targets": model.targets.tolist(),
        }
    elif kind == BASELINE:
        weights = {"constant_prediction": model.constant_prediction.tolist()}
    else:
        weights = {
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
        }
    return hyper, weights


def save_model(model, path, provenance: dict | None = None) -> None:
    hyper, weights = _encode(model)
    doc = {
        "model_type": model_type_of(model),
        "hyperparameters": hyper,
        "weights": weights,
        "provenance": provenance or {},
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def _arr(value, ndim: int) -> np.ndarray:
    a = np.asarray(value, dtype=np.float64)
    if a.ndim != ndim:
        raise ModelParseError(f"expected a {ndim}-D array, got shape {a.shape}")
    return a


def load_model(path):
    """Returns (model, document dict); document['provenance'] holds metadata."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelParseError(f"malformed model file: {exc}") from None
    kind = doc.get("model_type")
    hyper = doc.get("hyperparameters", {})
    weights = doc.get("weights", {})
    try:
        if kind == LINEAR:
            model = LinearModel(
                weights=_arr(weights["weights"], 2),
                bias=_arr(weights["bias"], 1),
                feature_means=_arr(weights["feature_means"], 1),
                target_means=_arr(weights["target_means"], 1),
            )
        elif kind == RIDGE:
            model = RidgeModel(
                weights=_arr(weights["weights"], 2),
                bias=_arr(weights["bias"], 1),
                feature_means=_arr(weights["feature_means"], 1),
                target_means=_arr(weights["target_means"], 1),
                alpha=float(hyper["alpha"]),
            )
        elif kind == KNN:
            model = KnnModel(
                k=int(hyper["k"]),
                features=_arr(weights["features"], 2),
                targets=_arr(weights["targets"], 2),
            )
        elif kind == BASELINE:
            model = BaselineModel(constant_prediction=_arr(weights["constant_prediction"], 1))
        elif kind == MLP:
            scaling = [
                (float(s), float(o)) for s, o in hyper.get("target_scaling", [])
            ]
            model = MlpModel(
                layer_sizes=[int(s) for s in hyper["layer_sizes"]],
                weights=[_arr(w, 2) for w in weights["weights"]],
                biases=[_arr(b, 1) for b in weights["biases"]],
                target_scaling=scaling or None,
            )
        else:
            raise ModelParseError(f"unknown model_type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelParseError):
            raise
        raise ModelParseError(f"bad model file field: {exc}") from None
    return model, doc
