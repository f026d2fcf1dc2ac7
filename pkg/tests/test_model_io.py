"""Model JSON persistence round-trips."""

import json

import numpy as np
import pytest

from qwlearn.errors import ModelParseError
from qwlearn.estimators import BaselineModel, KnnModel, LinearModel, RidgeModel
from qwlearn.model_io import load_model, save_model
from qwlearn.neural import MlpModel, init_mlp

PROV = {"dataset_kind": "single_theta", "split_seed": 42, "split_ratio": 0.75}


def roundtrip(model, tmp_path, provenance=PROV):
    path = tmp_path / "model.json"
    save_model(model, path, provenance)
    return load_model(path)


def test_linear_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    model = LinearModel(
        weights=rng.normal(size=(4, 2)),
        bias=rng.normal(size=2),
        feature_means=rng.normal(size=4),
        target_means=rng.normal(size=2),
    )
    loaded, doc = roundtrip(model, tmp_path)
    assert isinstance(loaded, LinearModel) and not isinstance(loaded, RidgeModel)
    assert np.array_equal(loaded.weights, model.weights)
    assert np.array_equal(loaded.bias, model.bias)
    assert doc["provenance"] == PROV
    assert doc["model_type"] == "linear"


def test_ridge_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    model = RidgeModel(
        weights=rng.normal(size=(3, 1)),
        bias=rng.normal(size=1),
        feature_means=rng.normal(size=3),
        target_means=rng.normal(size=1),
        alpha=0.01,
    )
    loaded, doc = roundtrip(model, tmp_path)
    assert isinstance(loaded, RidgeModel)
    assert loaded.alpha == 0.01
    assert np.array_equal(loaded.weights, model.weights)
    assert doc["hyperparameters"]["alpha"] == 0.01


def test_knn_round_trip_embeds_rows(tmp_path):
    rng = np.random.default_rng(2)
    model = KnnModel(k=5, features=rng.normal(size=(10, 3)), targets=rng.normal(size=(10, 1)))
    loaded, doc = roundtrip(model, tmp_path)
    assert isinstance(loaded, KnnModel)
    assert loaded.k == 5
    assert np.array_equal(loaded.features, model.features)
    assert np.array_equal(loaded.targets, model.targets)


def test_baseline_round_trip(tmp_path):
    model = BaselineModel(constant_prediction=np.array([0.25, 3.5]))
    loaded, _ = roundtrip(model, tmp_path)
    assert isinstance(loaded, BaselineModel)
    assert np.array_equal(loaded.constant_prediction, model.constant_prediction)


def test_mlp_round_trip(tmp_path):
    model = init_mlp([6, 4, 2], seed=3)
    model.target_scaling = [(2.0, 0.0), (1.0 / 499, 0.0)]
    loaded, doc = roundtrip(model, tmp_path)
    assert isinstance(loaded, MlpModel)
    assert loaded.layer_sizes == [6, 4, 2]
    assert loaded.target_scaling == model.target_scaling
    for a, b in zip(loaded.weights + loaded.biases, model.weights + model.biases):
        assert np.array_equal(a, b)
    assert doc["hyperparameters"]["activations"] == ["relu", "exp"]


def test_unknown_model_type_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model_type": "forest", "weights": {}}), encoding="utf-8")
    with pytest.raises(ModelParseError):
        load_model(path)


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ModelParseError):
        load_model(path)


def test_missing_fields_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model_type": "knn", "weights": {}}), encoding="utf-8")
    with pytest.raises(ModelParseError):
        load_model(path)


def test_save_is_deterministic(tmp_path):
    model = BaselineModel(constant_prediction=np.array([1.0 / 3.0]))
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_model(model, a, PROV)
    save_model(model, b, PROV)
    assert a.read_bytes() == b.read_bytes()
