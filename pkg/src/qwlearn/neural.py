"""From-scratch multilayer perceptron trained with backpropagation and Nadam.

The network predicts the walk parameters (theta, steps) jointly from a
probability distribution.  Hidden layers use rectified-linear activations;
the output layer applies elementwise exp, so predictions are strictly
positive.  Targets are scaled to roughly [0, 1] per component before
training; the inverse map is applied at prediction time.

All randomness (weight init, batch shuffles) comes from SplitMix64, so a
training run is a pure function of (data, seed, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import (
    InvalidParameterError,
    NumericalFailureError,
    ShapeError,
    TrainingFailureError,
)
from .rng import shuffled_indices, uniform_doubles

HIDDEN_ACTIVATION = "relu"
OUTPUT_ACTIVATION = "exp"


@dataclass
class MlpModel:
    layer_sizes: list[int]
    weights: list[np.ndarray]  # weights[l] has shape (layer_sizes[l], layer_sizes[l+1])
    biases: list[np.ndarray]
    target_scaling: list[tuple[float, float]] | None = None  # (scale, offset) per target

    @property
    def n_layers(self) -> int:
        return len(self.weights)


@dataclass
class NadamState:
    """Optimizer moments; shapes mirror the parameter list."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    learning_rate: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not 0.0 <= self.beta1 < 1.0:
            raise InvalidParameterError(f"beta1 must lie in [0, 1), got {self.beta1}")
        if not 0.0 < self.beta2 < 1.0:
            raise InvalidParameterError(f"beta2 must lie in (0, 1), got {self.beta2}")
        if not self.learning_rate > 0:
            raise InvalidParameterError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.epsilon > 0:
            raise InvalidParameterError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 64
    seed: int = 0
    loss: str = "squared_error"
    target_scaling: list[tuple[float, float]] | None = None
    hidden_sizes: tuple[int, ...] = (200,)
    learning_rate: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidParameterError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.loss != "squared_error":
            raise InvalidParameterError(f"unsupported loss {self.loss!r}")


def init_mlp(layer_sizes, seed: int) -> MlpModel:
    """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases, seeded stream."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise InvalidParameterError(
            f"layer_sizes needs >= 2 entries, all >= 1, got {sizes}"
        )
    total = sum(a * b for a, b in zip(sizes[:-1], sizes[1:]))
    draws = uniform_doubles(total, seed)
    weights = []
    biases = []
    pos = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        count = fan_in * fan_out
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        w = (2.0 * draws[pos : pos + count] - 1.0) * limit
        weights.append(w.reshape(fan_in, fan_out))
        biases.append(np.zeros(fan_out))
        pos += count
    return MlpModel(layer_sizes=sizes, weights=weights, biases=biases)


def _forward_full(model: MlpModel, x: np.ndarray):
    """Per-layer activations for a (m, in) batch; returns (activations, preacts)."""
    acts = [x]
    pre = []
    last = model.n_layers - 1
    a = x
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        pre.append(z)
        a = np.exp(z) if layer == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts, pre


def forward(model: MlpModel, features) -> np.ndarray:
    """Output vector for one feature vector (affine, ReLU, ..., affine, exp)."""
    q = np.asarray(features, dtype=np.float64)
    if q.ndim != 1 or q.size != model.layer_sizes[0]:
        raise ShapeError(
            f"features must be a vector of length {model.layer_sizes[0]}, got shape {q.shape}"
        )
    acts, _ = _forward_full(model, q.reshape(1, -1))
    return acts[-1][0]


def forward_batch(model: MlpModel, features) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.layer_sizes[0]:
        raise ShapeError(
            f"features must be (m, {model.layer_sizes[0]}), got shape {x.shape}"
        )
    acts, _ = _forward_full(model, x)
    return acts[-1]


def loss_and_grad(model: MlpModel, batch, config: TrainConfig | None = None):
    """Mean squared error over the batch and its exact parameter gradients.

    `batch` is an (inputs, targets) pair in the model's output space
    (targets already scaled).  The ReLU subgradient at exactly 0 is 0.
    """
    x, y = batch
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if y.ndim == 1:
        y = y.reshape(1, -1)
    if x.shape[0] == 0:
        raise ShapeError("batch must be nonempty")
    if x.shape[0] != y.shape[0] or x.shape[1] != model.layer_sizes[0] \
            or y.shape[1] != model.layer_sizes[-1]:
        raise ShapeError(f"batch shapes {x.shape} / {y.shape} do not match the model")
    acts, pre = _forward_full(model, x)
    out = acts[-1]
    m = x.shape[0]
    diff = out - y
    loss = float((diff * diff).sum() / m)
    dz = (2.0 / m) * diff * out  # d loss / d preact through exp
    n_layers = model.n_layers
    grad_w = [None] * n_layers
    grad_b = [None] * n_layers
    for layer in range(n_layers - 1, -1, -1):
        grad_w[layer] = acts[layer].T @ dz
        grad_b[layer] = dz.sum(axis=0)
        if layer > 0:
            dz = (dz @ model.weights[layer].T) * (pre[layer - 1] > 0)
    return loss, (grad_w, grad_b)


def init_nadam(model: MlpModel, config: TrainConfig) -> NadamState:
    shapes = [w for w in model.weights] + [b for b in model.biases]
    return NadamState(
        m=[np.zeros_like(p) for p in shapes],
        v=[np.zeros_like(p) for p in shapes],
        learning_rate=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        epsilon=config.epsilon,
    )


def nadam_step(state: NadamState, params, grads):
    """One Nesterov-accelerated adaptive-moment update, in place.

    params and grads are (weights list, biases list) pairs.  The first
    moment estimate mixes the bias-corrected running mean with the current
    gradient's look-ahead correction.
    """
    flat_p = list(params[0]) + list(params[1])
    flat_g = list(grads[0]) + list(grads[1])
    names = [f"weights[{i}]" for i in range(len(params[0]))] + [
        f"biases[{i}]" for i in range(len(params[1]))
    ]
    if len(flat_p) != len(state.m):
        raise ShapeError("parameter count does not match optimizer state")
    for name, g in zip(names, flat_g):
        if not np.isfinite(g).all():
            raise NumericalFailureError(f"non-finite gradient in {name}")
    state.t += 1
    t = state.t
    b1 = state.beta1
    b2 = state.beta2
    coef_m = b1 / (1.0 - b1 ** (t + 1))
    coef_g = (1.0 - b1) / (1.0 - b1**t)
    v_corr = 1.0 - b2**t
    for p, g, m, v in zip(flat_p, flat_g, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = coef_m * m + coef_g * g
        v_hat = v / v_corr
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state


def default_target_scaling(targets: np.ndarray) -> list[tuple[float, float]]:
    """Per-target scale 1/max|y| (offset 0), mapping training targets into [-1, 1]."""
    scaling = []
    for j in range(targets.shape[1]):
        peak = float(np.abs(targets[:, j]).max()) if targets.shape[0] else 0.0
        scaling.append((1.0 / peak if peak > 0 else 1.0, 0.0))
    return scaling


def scale_targets(targets: np.ndarray, scaling) -> np.ndarray:
    scales = np.array([s for s, _ in scaling])
    offsets = np.array([o for _, o in scaling])
    return targets * scales + offsets


def unscale_outputs(outputs: np.ndarray, scaling) -> np.ndarray:
    scales = np.array([s for s, _ in scaling])
    offsets = np.array([o for _, o in scaling])
    return (outputs - offsets) / scales


def train_mlp(train: Dataset, config: TrainConfig | None = None):
    """Train on the dataset; returns (model, per-epoch mean loss history).

    Mini-batches are drawn from a fresh Fisher-Yates shuffle each epoch,
    seeded by config.seed + epoch, so training is bitwise reproducible.
    """
    if config is None:
        config = TrainConfig()
    x = np.ascontiguousarray(train.features, dtype=np.float64)
    y = np.asarray(train.targets, dtype=np.float64)
    n = x.shape[0]
    if n < 1:
        raise ShapeError("training dataset is empty")
    if config.batch_size > n:
        raise InvalidParameterError(
            f"batch_size {config.batch_size} exceeds training rows {n}"
        )
    scaling = config.target_scaling or default_target_scaling(y)
    ys = scale_targets(y, scaling)
    layer_sizes = [x.shape[1], *config.hidden_sizes, y.shape[1]]
    model = init_mlp(layer_sizes, config.seed)
    model.target_scaling = [(float(s), float(o)) for s, o in scaling]
    state = init_nadam(model, config)
    history = []
    for epoch in range(config.epochs):
        perm = np.asarray(shuffled_indices(n, config.seed + epoch))
        epoch_loss = 0.0
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            idx = perm[start : start + config.batch_size]
            loss, grads = loss_and_grad(model, (x[idx], ys[idx]), config)
            if not math.isfinite(loss):
                raise TrainingFailureError(
                    f"training diverged (non-finite loss) at epoch {epoch}, batch {batch_index}",
                    epoch=epoch,
                    batch=batch_index,
                )
            nadam_step(state, (model.weights, model.biases), grads)
            epoch_loss += loss * idx.size
        history.append(epoch_loss / n)
    return model, history


def predict_params(model: MlpModel, features, target_scaling=None):
    """(theta, steps) prediction: forward pass then inverse target scaling."""
    scaling = target_scaling if target_scaling is not None else model.target_scaling
    if scaling is None:
        raise InvalidParameterError("model has no target scaling")
    out = forward(model, features)
    if out.size != 2 or len(scaling) != 2:
        raise ShapeError("parameter prediction expects exactly 2 outputs (theta, steps)")
    theta, steps = unscale_outputs(out, scaling)
    return float(theta), float(steps)


def predict_batch(model: MlpModel, features) -> np.ndarray:
    """Unscaled target predictions for each row of a feature matrix."""
    if model.target_scaling is None:
        raise InvalidParameterError("model has no target scaling")
    return unscale_outputs(forward_batch(model, features), model.target_scaling)
