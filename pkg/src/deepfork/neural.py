"""Batch-normalized feedforward binary classifier, implemented from scratch.

Two presets are exposed: deepfork4 (input -> 64 -> 32 -> 16 -> 1) and
deepfork6 (input -> 128 -> 96 -> 64 -> 32 -> 16 -> 1), both with an input
batch-normalization layer, ReLU hidden activations and a sigmoid output.
Everything is plain numpy: forward, backprop (including the batch-norm
gradient), SGD and Adam.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDim, BadHyperparam, BadShape, BadStep, TrainBatchTooSmall

VALID_INPUT_DIMS = (12, 15, 17, 29)

P_CLAMP = 1e-12  # probabilities clipped to [P_CLAMP, 1 - P_CLAMP] in the loss


class Activation(enum.Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"


class Architecture(enum.Enum):
    FOUR_LAYER = "deepfork4"
    SIX_LAYER = "deepfork6"


HIDDEN_WIDTHS = {
    Architecture.FOUR_LAYER: (64, 32, 16),
    Architecture.SIX_LAYER: (128, 96, 64, 32, 16),
}


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: Activation

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise BadDim(f"layer dims must be positive, got "
                         f"{self.in_dim}x{self.out_dim}")


@dataclass
class TrainConfig:
    epochs: int
    batch_size: int
    optimizer: str  # "sgd" or "adam"
    learning_rate: float
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise BadHyperparam(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise BadHyperparam(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise BadHyperparam(f"learning_rate must be > 0, "
                                f"got {self.learning_rate}")
        if self.optimizer not in ("sgd", "adam"):
            raise BadHyperparam(f"unknown optimizer {self.optimizer!r}")


# Best setups found by grid search over batch size, epochs and learning rate.
PRESET_CONFIG = {
    Architecture.FOUR_LAYER: TrainConfig(epochs=100, batch_size=64,
                                         optimizer="adam", learning_rate=1e-3),
    Architecture.SIX_LAYER: TrainConfig(epochs=250, batch_size=128,
                                        optimizer="adam", learning_rate=1e-4),
}


class BatchNorm:
    """Input normalization layer with learnable scale and shift."""

    def __init__(self, dim, momentum=0.9, eps=1e-5):
        self.dim = dim
        self.momentum = momentum
        self.eps = eps
        self.gamma = np.ones(dim, dtype=np.float64)
        self.beta = np.zeros(dim, dtype=np.float64)
        self.running_mean = np.zeros(dim, dtype=np.float64)
        self.running_var = np.ones(dim, dtype=np.float64)

    def forward(self, x, training):
        if training:
            mean = x.mean(axis=0)
            var = x.var(axis=0)  # biased, matches the running-stat update
            m = self.momentum
            self.running_mean = m * self.running_mean + (1 - m) * mean
            self.running_var = m * self.running_var + (1 - m) * var
        else:
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        x_hat = (x - mean) * inv_std
        cache = (x, x_hat, mean, inv_std) if training else None
        return self.gamma * x_hat + self.beta, cache

    def backward(self, dout, cache):
        """Gradient through batch statistics; returns (dx, dgamma, dbeta)."""
        x, x_hat, mean, inv_std = cache
        n = x.shape[0]
        dgamma = np.sum(dout * x_hat, axis=0)
        dbeta = np.sum(dout, axis=0)
        dx_hat = dout * self.gamma
        dvar = np.sum(dx_hat * (x - mean), axis=0) * -0.5 * inv_std**3
        dmean = (np.sum(dx_hat, axis=0) * -inv_std
                 + dvar * np.mean(-2.0 * (x - mean), axis=0))
        dx = dx_hat * inv_std + dvar * 2.0 * (x - mean) / n + dmean / n
        return dx, dgamma, dbeta


class Network:
    """Feedforward stack: batch norm, then dense layers per `specs`."""

    def __init__(self, specs, seed=0, arch=None):
        if not specs:
            raise BadDim("network needs at least one layer")
        for a, b in zip(specs, specs[1:]):
            if a.out_dim != b.in_dim:
                raise BadDim(f"layer chain breaks: {a.out_dim} -> {b.in_dim}")
        if specs[-1].out_dim != 1 or specs[-1].activation is not Activation.SIGMOID:
            raise BadDim("final layer must be 1-dim sigmoid")
        self.specs = list(specs)
        self.input_dim = specs[0].in_dim
        self.arch = arch
        self.bn = BatchNorm(self.input_dim)
        rng = np.random.default_rng(seed)
        self.weights = []
        self.biases = []
        for spec in specs:
            limit = np.sqrt(6.0 / (spec.in_dim + spec.out_dim))
            w = rng.uniform(-limit, limit, size=(spec.out_dim, spec.in_dim))
            self.weights.append(w)
            self.biases.append(np.zeros(spec.out_dim, dtype=np.float64))

    def params(self):
        """Parameter arrays in a fixed order; updated in place by optimizers."""
        out = [self.bn.gamma, self.bn.beta]
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def to_state(self):
        from .serialize import encode_array
        return {
            "arch": self.arch.value if self.arch else None,
            "momentum": self.bn.momentum,
            "eps": self.bn.eps,
            "bn_gamma": encode_array(self.bn.gamma),
            "bn_beta": encode_array(self.bn.beta),
            "bn_running_mean": encode_array(self.bn.running_mean),
            "bn_running_var": encode_array(self.bn.running_var),
            "layers": [
                {"in_dim": s.in_dim, "out_dim": s.out_dim,
                 "activation": s.activation.value,
                 "weight": encode_array(w), "bias": encode_array(b)}
                for s, w, b in zip(self.specs, self.weights, self.biases)
            ],
        }

    @classmethod
    def from_state(cls, state):
        from .serialize import decode_array
        specs = [LayerSpec(d["in_dim"], d["out_dim"],
                           Activation(d["activation"]))
                 for d in state["layers"]]
        arch = Architecture(state["arch"]) if state.get("arch") else None
        net = cls(specs, seed=0, arch=arch)
        net.bn.momentum = state["momentum"]
        net.bn.eps = state["eps"]
        net.bn.gamma = decode_array(state["bn_gamma"])
        net.bn.beta = decode_array(state["bn_beta"])
        net.bn.running_mean = decode_array(state["bn_running_mean"])
        net.bn.running_var = decode_array(state["bn_running_var"])
        net.weights = [decode_array(d["weight"]) for d in state["layers"]]
        net.biases = [decode_array(d["bias"]) for d in state["layers"]]
        return net


def init_network(input_dim, arch, seed=0):
    """Fresh network in one of the two preset shapes."""
    if input_dim not in VALID_INPUT_DIMS:
        raise BadDim(f"input_dim must be one of {VALID_INPUT_DIMS}, "
                     f"got {input_dim}")
    widths = HIDDEN_WIDTHS[arch]
    dims = [input_dim] + list(widths) + [1]
    specs = [LayerSpec(dims[i], dims[i + 1], Activation.RELU)
             for i in range(len(dims) - 2)]
    specs.append(LayerSpec(dims[-2], 1, Activation.SIGMOID))
    return Network(specs, seed=seed, arch=arch)


def _sigmoid(z):
    # piecewise form avoids overflow in exp for large |z|
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(net, x, train_mode=False):
    """Probabilities for a batch, plus the cache backward() needs."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise BadShape(f"expected (n, {net.input_dim}) batch, got {x.shape}")
    if train_mode and x.shape[0] < 2:
        raise TrainBatchTooSmall(
            f"train-mode batch statistics need n >= 2, got {x.shape[0]}")
    a, bn_cache = net.bn.forward(x, train_mode)
    activations = [a]
    for spec, w, b in zip(net.specs, net.weights, net.biases):
        z = a @ w.T + b
        if spec.activation is Activation.RELU:
            a = np.maximum(z, 0.0)
        elif spec.activation is Activation.SIGMOID:
            a = _sigmoid(z)
        else:
            a = z
        activations.append(a)
    probs = activations[-1][:, 0]
    return probs, (bn_cache, activations)


def bce_loss(probs, labels):
    """Mean binary cross-entropy with probabilities clamped away from 0/1."""
    p = np.clip(probs, P_CLAMP, 1.0 - P_CLAMP)
    y = np.asarray(labels, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def _backward(net, probs, y, cache):
    """Gradients for every parameter, aligned with net.params()."""
    bn_cache, activations = cache
    n = len(probs)
    # sigmoid + BCE collapse to (p - y)/n at the output pre-activation
    dz = ((probs - y) / n)[:, None]
    w_grads = [None] * len(net.weights)
    b_grads = [None] * len(net.biases)
    dgamma = dbeta = None
    for i in range(len(net.weights) - 1, -1, -1):
        a_prev = activations[i]
        w_grads[i] = dz.T @ a_prev
        b_grads[i] = dz.sum(axis=0)
        da = dz @ net.weights[i]
        if i > 0:
            dz = da * (activations[i] > 0.0)  # ReLU mask
        else:
            _, dgamma, dbeta = net.bn.backward(da, bn_cache)
    grads = [dgamma, dbeta]
    for wg, bg in zip(w_grads, b_grads):
        grads.append(wg)
        grads.append(bg)
    return grads


def loss_and_gradients(net, x, labels):
    """Train-mode forward plus full backprop.

    Returns (loss, grads) with grads aligned to net.params(). Updates the
    batch-norm running statistics as a side effect, as a training step should.
    """
    y = np.asarray(labels, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise BadShape(f"batch {x.shape} incompatible with labels {y.shape}")
    probs, cache = forward(net, x, train_mode=True)
    loss = bce_loss(probs, y)
    return loss, _backward(net, probs, y, cache)


def sgd_step(params, grads, lr):
    """In-place theta <- theta - lr * g."""
    for p, g in zip(params, grads):
        p -= lr * g
    return params


@dataclass
class AdamState:
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params):
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


def adam_step(state, params, grads, lr, t,
              beta1=0.9, beta2=0.999, eps=1e-8):
    """One Adam update with bias correction; t counts steps from 1."""
    if t < 1:
        raise BadStep(f"Adam step index must be >= 1, got {t}")
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = beta1 * state.m[i] + (1 - beta1) * g
        state.v[i] = beta2 * state.v[i] + (1 - beta2) * g * g
        m_hat = state.m[i] / (1 - beta1**t)
        v_hat = state.v[i] / (1 - beta2**t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return params, state


def train(net, x, y, config, x_val=None, y_val=None):
    """Minibatch training loop; returns (net, history).

    history holds exactly config.epochs rows. Train loss/accuracy are the
    sample-weighted means over the epoch's minibatches (measured before each
    update); validation metrics come from an eval-mode pass at epoch end.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim or y.shape != (x.shape[0],):
        raise BadShape(f"train data {x.shape} / labels {y.shape} do not fit "
                       f"input dim {net.input_dim}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    n = x.shape[0]
    if n < 2:
        raise TrainBatchTooSmall(f"need at least 2 training samples, got {n}")

    params = net.params()
    adam = AdamState.for_params(params) if config.optimizer == "adam" else None
    rng = np.random.default_rng(config.seed)
    history = []
    t = 0
    for epoch in range(1, config.epochs + 1):
        perm = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        seen = 0
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            if len(idx) < 2 and start > 0:
                continue  # dropped final partial batch
            xb, yb = x[idx], y[idx]
            probs, cache = forward(net, xb, train_mode=True)
            loss = bce_loss(probs, yb)
            grads = _backward(net, probs, yb, cache)
            if adam is None:
                sgd_step(params, grads, config.learning_rate)
            else:
                t += 1
                adam_step(adam, params, grads, config.learning_rate, t,
                          config.adam_beta1, config.adam_beta2, config.adam_eps)
            loss_sum += loss * len(idx)
            correct += int(np.sum((probs >= 0.5) == (yb == 1.0)))
            seen += len(idx)
        row = {
            "epoch": epoch,
            "train_loss": loss_sum / seen,
            "train_acc": correct / seen,
            "val_loss": float("nan"),
            "val_acc": float("nan"),
        }
        if x_val is not None and len(x_val):
            vp, _ = forward(net, np.asarray(x_val, dtype=np.float64),
                            train_mode=False)
            yv = np.asarray(y_val, dtype=np.float64)
            row["val_loss"] = bce_loss(vp, yv)
            row["val_acc"] = float(np.mean((vp >= 0.5) == (yv == 1.0)))
        history.append(row)
    return net, history


def predict(net, x):
    """(labels, probs); threshold 0.5 with ties going to the positive class."""
    probs, _ = forward(net, x, train_mode=False)
    return (probs >= 0.5).astype(np.int64), probs


def moving_average(values, window=10):
    """Trailing mean over `window` points (shorter at the start)."""
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    csum = np.cumsum(values)
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out[i] = (csum[i] - (csum[lo - 1] if lo > 0 else 0.0)) / (i - lo + 1)
    return out


def write_history_csv(history, path):
    import csv as _csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "train_acc",
                         "val_loss", "val_acc"])
        for row in history:
            writer.writerow([row["epoch"], repr(row["train_loss"]),
                             repr(row["train_acc"]), repr(row["val_loss"]),
                             repr(row["val_acc"])])
