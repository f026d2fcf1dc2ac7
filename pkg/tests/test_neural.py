"""MLP forward/backward math, the Nadam update, and training behavior."""

import math

import numpy as np
import pytest

from qwlearn.dataset import Dataset
from qwlearn.errors import (
    InvalidParameterError,
    NumericalFailureError,
    ShapeError,
    TrainingFailureError,
)
from qwlearn.neural import (
    MlpModel,
    NadamState,
    TrainConfig,
    default_target_scaling,
    forward,
    init_mlp,
    loss_and_grad,
    nadam_step,
    predict_params,
    train_mlp,
    unscale_outputs,
)


def tiny_model(weight=1.0):
    return MlpModel(
        layer_sizes=[1, 1, 1],
        weights=[np.array([[weight]]), np.array([[weight]])],
        biases=[np.zeros(1), np.zeros(1)],
    )


def make_dataset(features, targets):
    return Dataset(
        kind="synthetic",
        features=np.asarray(features, float),
        targets=np.asarray(targets, float),
        target_names=["theta", "steps"],
        position_offset=0,
    )


# ---------------------------------------------------------------- init


def test_init_is_deterministic_per_seed():
    a = init_mlp([7, 5, 2], seed=3)
    b = init_mlp([7, 5, 2], seed=3)
    c = init_mlp([7, 5, 2], seed=4)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert not np.array_equal(a.weights[0], c.weights[0])


def test_init_shapes_for_wide_input():
    model = init_mlp([999, 200, 2], seed=0)
    assert model.weights[0].shape == (999, 200)
    assert model.weights[1].shape == (200, 2)
    assert all(not b.any() for b in model.biases)


def test_init_respects_uniform_bounds():
    model = init_mlp([40, 30, 2], seed=9)
    for w, (fan_in, fan_out) in zip(model.weights, ((40, 30), (30, 2))):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        assert np.abs(w).max() <= limit
        assert np.abs(w).max() > 0.5 * limit  # draws actually span the range


def test_init_rejects_bad_sizes():
    with pytest.raises(InvalidParameterError):
        init_mlp([5], seed=0)
    with pytest.raises(InvalidParameterError):
        init_mlp([5, 0, 2], seed=0)


# ---------------------------------------------------------------- forward


def test_forward_hand_value():
    out = forward(tiny_model(), [2.0])
    assert out[0] == pytest.approx(math.exp(2.0), rel=1e-12)


def test_forward_relu_clamps_negative():
    assert forward(tiny_model(), [-1.0])[0] == pytest.approx(1.0, abs=1e-15)


def test_forward_zero_weights():
    assert forward(tiny_model(0.0), [123.0])[0] == 1.0


def test_forward_outputs_positive():
    rng = np.random.default_rng(0)
    model = init_mlp([6, 4, 2], seed=1)
    for _ in range(20):
        assert (forward(model, rng.normal(size=6)) > 0).all()


def test_forward_shape_check():
    with pytest.raises(ShapeError):
        forward(tiny_model(), [1.0, 2.0])


# ---------------------------------------------------------------- loss/grad


def test_perfect_prediction_gives_zero_loss_and_grads():
    model = init_mlp([3, 4, 2], seed=2)
    x = np.array([[0.3, -0.2, 0.8]])
    y = np.array([forward(model, x[0])])
    loss, (gw, gb) = loss_and_grad(model, (x, y))
    assert loss == 0.0
    assert all(np.abs(g).max() == 0.0 for g in gw + gb)


def test_duplicated_batch_matches_single_sample():
    model = init_mlp([3, 4, 2], seed=5)
    x = np.array([[0.1, 0.5, -0.7]])
    y = np.array([[0.2, 0.9]])
    loss1, (gw1, gb1) = loss_and_grad(model, (x, y))
    loss2, (gw2, gb2) = loss_and_grad(model, (np.vstack([x, x]), np.vstack([y, y])))
    assert loss1 == loss2
    for a, b in zip(gw1 + gb1, gw2 + gb2):
        # matmul kernels may fuse multiply-adds, so allow last-ulp wiggle
        assert np.abs(a - b).max() <= 1e-15 * max(1.0, np.abs(a).max())


def test_empty_batch_rejected():
    model = init_mlp([3, 4, 2], seed=5)
    with pytest.raises(ShapeError):
        loss_and_grad(model, (np.empty((0, 3)), np.empty((0, 2))))


def finite_difference_grads(model, x, y):
    params = model.weights + model.biases
    grads = [np.zeros_like(p) for p in params]
    for p, g in zip(params, grads):
        flat_p = p.ravel()
        flat_g = g.ravel()
        for i in range(flat_p.size):
            h = 1e-6 * max(1.0, abs(flat_p[i]))
            orig = flat_p[i]
            flat_p[i] = orig + h
            hi, _ = loss_and_grad(model, (x, y))
            flat_p[i] = orig - h
            lo, _ = loss_and_grad(model, (x, y))
            flat_p[i] = orig
            flat_g[i] = (hi - lo) / (2 * h)
    return grads


def relative_error(a, b):
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-3)
    return np.abs(a - b).max() / scale


def test_backprop_matches_finite_differences():
    rng = np.random.default_rng(7)
    for _ in range(10):
        sizes = [int(rng.integers(1, 4)), int(rng.integers(1, 5)), 2]
        model = init_mlp(sizes, seed=int(rng.integers(0, 1000)))
        x = rng.normal(size=(3, sizes[0]))
        y = rng.uniform(0.1, 1.0, size=(3, 2))
        loss, (gw, gb) = loss_and_grad(model, (x, y))
        fd = finite_difference_grads(model, x, y)
        analytic = gw + gb
        assert max(relative_error(a, f) for a, f in zip(analytic, fd)) < 1e-4


# ---------------------------------------------------------------- nadam


def test_nadam_hand_computed_first_step():
    state = NadamState(m=[np.zeros(1)], v=[np.zeros(1)])
    params = ([np.zeros(1)], [])
    grads = ([np.ones(1)], [])
    # flatten manually since state carries one parameter group
    nadam_step(state, params, grads)
    assert state.t == 1
    assert params[0][0][0] == pytest.approx(-0.00294737, abs=1e-8)


def test_nadam_zero_gradient_is_identity():
    state = NadamState(m=[np.zeros(2)], v=[np.zeros(2)])
    params = ([np.array([1.0, -2.0])], [])
    nadam_step(state, params, ([np.zeros(2)], []))
    assert np.array_equal(params[0][0], [1.0, -2.0])


def test_nadam_deterministic():
    def run():
        state = NadamState(m=[np.zeros(3)], v=[np.zeros(3)])
        params = ([np.ones(3)], [])
        for _ in range(5):
            nadam_step(state, params, ([np.array([0.5, -1.0, 2.0])], []))
        return params[0][0].copy()

    assert np.array_equal(run(), run())


def test_nadam_degenerates_to_sgd_direction_without_momentum():
    for g in (3.0, -0.25, 1e-4):
        state = NadamState(m=[np.zeros(1)], v=[np.zeros(1)], beta1=0.0, beta2=0.999)
        params = ([np.zeros(1)], [])
        nadam_step(state, params, ([np.array([g])], []))
        assert math.copysign(1.0, params[0][0][0]) == -math.copysign(1.0, g)


def test_nadam_rejects_non_finite_gradient():
    state = NadamState(m=[np.zeros(1), np.zeros(1)], v=[np.zeros(1), np.zeros(1)])
    params = ([np.zeros(1), np.zeros(1)], [])
    grads = ([np.zeros(1), np.array([float("inf")])], [])
    with pytest.raises(NumericalFailureError) as err:
        nadam_step(state, params, grads)
    assert "weights[1]" in str(err.value)


def test_nadam_state_validation():
    with pytest.raises(InvalidParameterError):
        NadamState(m=[], v=[], beta1=1.0)
    with pytest.raises(InvalidParameterError):
        NadamState(m=[], v=[], beta2=1.0)


# ---------------------------------------------------------------- training


def synthetic_task(n=20, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, size=(n, 4))
    theta = 0.2 + 0.5 * x[:, 0] + 0.3 * x[:, 1]
    steps = 1.0 + 3.0 * x[:, 2]
    return make_dataset(x, np.column_stack([theta, steps]))


def test_training_reduces_loss_tenfold():
    ds = synthetic_task()
    config = TrainConfig(epochs=200, batch_size=5, seed=1)
    _, history = train_mlp(ds, config)
    assert history[-1] < history[0] / 10
    assert all(math.isfinite(h) for h in history)


def test_training_is_bitwise_deterministic():
    ds = synthetic_task()
    config = TrainConfig(epochs=30, batch_size=4, seed=7)
    m1, h1 = train_mlp(ds, config)
    m2, h2 = train_mlp(ds, config)
    assert h1 == h2
    for a, b in zip(m1.weights + m1.biases, m2.weights + m2.biases):
        assert np.array_equal(a, b)


def test_training_config_validation():
    with pytest.raises(InvalidParameterError):
        TrainConfig(epochs=0)
    with pytest.raises(InvalidParameterError):
        TrainConfig(batch_size=0)
    with pytest.raises(InvalidParameterError):
        TrainConfig(loss="absolute_error")
    with pytest.raises(InvalidParameterError):
        train_mlp(synthetic_task(n=3), TrainConfig(epochs=1, batch_size=50))


def test_non_finite_loss_reports_epoch_and_batch():
    ds = synthetic_task()
    ds.features[:, 0] = float("nan")  # every batch produces a non-finite loss
    config = TrainConfig(epochs=3, batch_size=5, seed=0)
    with pytest.raises(TrainingFailureError) as err:
        train_mlp(ds, config)
    assert err.value.epoch == 0
    assert err.value.batch == 0


def test_default_target_scaling_uses_peak_magnitude():
    targets = np.array([[math.pi / 2, 499.0], [math.pi / 4, 100.0]])
    scaling = default_target_scaling(targets)
    assert scaling[0][0] == pytest.approx(2 / math.pi, rel=1e-12)
    assert scaling[1][0] == pytest.approx(1 / 499.0, rel=1e-12)
    assert scaling[0][1] == 0.0


def test_predict_params_inverts_scaling():
    model = init_mlp([3, 4, 2], seed=11)
    model.target_scaling = [(2.0, 0.0), (0.5, 0.0)]
    x = np.array([0.2, -0.1, 0.4])
    out = forward(model, x)
    theta, steps = predict_params(model, x)
    assert theta == pytest.approx(out[0] / 2.0, rel=1e-12)
    assert steps == pytest.approx(out[1] / 0.5, rel=1e-12)
    assert theta > 0 and steps > 0


def test_predict_params_memorizes_single_sample():
    row = np.array([[0.2, 0.8, 0.4, 0.1]])
    target = np.array([[0.9, 3.0]])
    ds = make_dataset(np.repeat(row, 8, axis=0), np.repeat(target, 8, axis=0))
    model, _ = train_mlp(ds, TrainConfig(epochs=400, batch_size=8, seed=2))
    theta, steps = predict_params(model, row[0])
    assert theta == pytest.approx(0.9, abs=0.05)
    assert steps == pytest.approx(3.0, abs=0.15)


def test_unscale_outputs_round_trip():
    scaling = [(0.5, 0.1), (2.0, -0.3)]
    raw = np.array([[0.4, 0.7]])
    scaled = raw * np.array([0.5, 2.0]) + np.array([0.1, -0.3])
    assert np.allclose(unscale_outputs(scaled, scaling), raw, atol=1e-14)
