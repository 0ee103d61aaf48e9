"""Self-contained feed-forward network engine.

A deliberately small stack: dense layers with ReLU hidden units and a
linear output head, exact reverse-mode gradients, SGD/Adam, MSE/Huber
losses, and bit-exact JSON checkpoints. Everything is seeded, so a
(seed, config, data) triple pins the final parameters bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

CHECKPOINT_FORMAT = "pinchsim-mlp-1"


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during training."""


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 32
    epochs: int = 100
    optimizer: str = "adam"  # "sgd" | "adam"
    seed: int = 0
    loss: str = "mse"  # "mse" | "huber"
    weight_decay: float = 0.0
    normalize: bool = True

    def __post_init__(self) -> None:
        if self.learning_rate <= 0 and self.learning_rate != 0.0:
            raise ValueError("learning_rate must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.loss not in ("mse", "huber"):
            raise ValueError(f"unknown loss {self.loss!r}")


class MlpModel:
    """Dense ReLU network with a linear output and stored input statistics.

    ``layer_sizes`` runs input -> hidden... -> output. Hidden weights use
    He initialization, the output layer Xavier. Input standardization uses
    the (mu, sigma) recorded at training time; a fresh model has identity
    statistics.
    """

    def __init__(self, layer_sizes: list[int], seed: int = 0):
        if len(layer_sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        if any(n < 1 for n in layer_sizes):
            raise ValueError("layer sizes must be positive")
        self.layer_sizes = [int(n) for n in layer_sizes]
        self.seed = int(seed)
        rng = np.random.Generator(np.random.PCG64(seed))
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        last = len(layer_sizes) - 2
        for i, (fan_in, fan_out) in enumerate(zip(layer_sizes, layer_sizes[1:])):
            if i == last:
                std = math.sqrt(2.0 / (fan_in + fan_out))
            else:
                std = math.sqrt(2.0 / fan_in)
            self.weights.append(rng.normal(0.0, std, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self.norm_mu = np.zeros(layer_sizes[0])
        self.norm_sigma = np.ones(layer_sizes[0])

    # -- parameter plumbing -------------------------------------------------

    def parameters(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def set_parameters(self, params: list[np.ndarray]) -> None:
        expected = self.parameters()
        if len(params) != len(expected):
            raise ValueError("parameter list length mismatch")
        for target, source in zip(expected, params):
            if target.shape != source.shape:
                raise ValueError("parameter shape mismatch")
            target[...] = source

    def clone(self) -> "MlpModel":
        twin = MlpModel(self.layer_sizes, self.seed)
        twin.set_parameters([p.copy() for p in self.parameters()])
        twin.norm_mu = self.norm_mu.copy()
        twin.norm_sigma = self.norm_sigma.copy()
        return twin

    # -- forward / backward -------------------------------------------------

    def _standardize(self, x: np.ndarray) -> np.ndarray:
        return (x - self.norm_mu) / self.norm_sigma

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        a = np.atleast_2d(x)
        if a.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"input width {a.shape[1]} != {self.layer_sizes[0]}")
        a = self._standardize(a)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w + b
            if i != last:
                a = np.maximum(a, 0.0)
        return a[0] if single else a

    def _forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
        a = self._standardize(np.atleast_2d(np.asarray(x, dtype=float)))
        activations = [a]
        pre: list[np.ndarray] = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = activations[-1] @ w + b
            pre.append(z)
            activations.append(np.maximum(z, 0.0) if i != last else z)
        return activations[-1], activations, pre

    def backward(
        self, x: np.ndarray, dy: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Gradients of sum(dy * output) w.r.t. parameters and raw inputs."""
        _, activations, pre = self._forward_cached(x)
        dy = np.atleast_2d(np.asarray(dy, dtype=float))
        grads: list[np.ndarray] = [np.empty(0)] * (2 * len(self.weights))
        delta = dy
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = activations[i].T @ delta
            grads[2 * i + 1] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (pre[i - 1] > 0.0)
        dx = (delta @ self.weights[0].T) / self.norm_sigma
        return grads, dx

    # -- checkpointing --------------------------------------------------------

    def save(self, path) -> None:
        doc = {
            "format": CHECKPOINT_FORMAT,
            "layer_sizes": self.layer_sizes,
            "seed": self.seed,
            "weights": [w.ravel().tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "norm_mu": self.norm_mu.tolist(),
            "norm_sigma": self.norm_sigma.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "MlpModel":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"unsupported checkpoint format {doc.get('format')!r}")
        model = cls(doc["layer_sizes"], seed=doc["seed"])
        for i, flat in enumerate(doc["weights"]):
            model.weights[i] = np.array(flat, dtype=float).reshape(model.weights[i].shape)
        for i, b in enumerate(doc["biases"]):
            model.biases[i] = np.array(b, dtype=float)
        model.norm_mu = np.array(doc["norm_mu"], dtype=float)
        model.norm_sigma = np.array(doc["norm_sigma"], dtype=float)
        return model


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------


def _loss_and_grad(pred: np.ndarray, target: np.ndarray, kind: str, delta: float = 1.0):
    r = pred - target
    count = r.size
    if kind == "mse":
        return float(np.mean(r * r)), (2.0 / count) * r
    if kind == "huber":
        absr = np.abs(r)
        quad = absr <= delta
        value = np.where(quad, 0.5 * r * r, delta * (absr - 0.5 * delta))
        grad = np.clip(r, -delta, delta) / count
        return float(np.mean(value)), grad
    raise ValueError(f"unknown loss {kind!r}")


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    return model.forward(x)


def gradient(
    model: MlpModel, batch: tuple[np.ndarray, np.ndarray], loss: str = "mse"
) -> tuple[float, list[np.ndarray]]:
    """Mean-loss value and exact parameter gradients over a batch."""
    x, y = batch
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    pred = model.forward(x)
    value, dy = _loss_and_grad(np.atleast_2d(pred), y, loss)
    if not math.isfinite(value):
        raise TrainingDiverged(f"non-finite loss {value}")
    grads, _ = model.backward(x, dy)
    return value, grads


# ---------------------------------------------------------------------------
# Optimizers
# ---------------------------------------------------------------------------


class SgdOptimizer:
    def __init__(self, model: MlpModel, lr: float, weight_decay: float = 0.0):
        self.model = model
        self.lr = lr
        self.weight_decay = weight_decay

    def step(self, grads: list[np.ndarray]) -> None:
        for p, g in zip(self.model.parameters(), grads):
            if self.weight_decay:
                g = g + self.weight_decay * p
            p -= self.lr * g


class AdamOptimizer:
    def __init__(
        self,
        model: MlpModel,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        self.model = model
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self.m = [np.zeros_like(p) for p in model.parameters()]
        self.v = [np.zeros_like(p) for p in model.parameters()]

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for i, (p, g) in enumerate(zip(self.model.parameters(), grads)):
            if self.weight_decay:
                g = g + self.weight_decay * p
            self.m[i] = b1 * self.m[i] + (1 - b1) * g
            self.v[i] = b2 * self.v[i] + (1 - b2) * g * g
            m_hat = self.m[i] / (1 - b1**self.t)
            v_hat = self.v[i] / (1 - b2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(model: MlpModel, config: TrainConfig):
    if config.optimizer == "adam":
        return AdamOptimizer(model, config.learning_rate, weight_decay=config.weight_decay)
    return SgdOptimizer(model, config.learning_rate, weight_decay=config.weight_decay)


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------


@dataclass
class TrainTrace:
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else math.nan


def train(
    model: MlpModel, dataset: tuple[np.ndarray, np.ndarray], config: TrainConfig
) -> TrainTrace:
    """Mini-batch training with seeded shuffling; mutates the model in place.

    Input statistics are fitted on the training set once (unless
    ``normalize`` is off) before the first update. Divergence raises
    rather than returning silently broken parameters.
    """
    x = np.atleast_2d(np.asarray(dataset[0], dtype=float))
    y = np.atleast_2d(np.asarray(dataset[1], dtype=float))
    if x.shape[0] == 0:
        raise ValueError("dataset must be non-empty")
    if y.shape[0] != x.shape[0]:
        raise ValueError("feature/target row counts differ")

    if config.normalize:
        model.norm_mu = x.mean(axis=0)
        sigma = x.std(axis=0)
        sigma[sigma < 1e-12] = 1.0
        model.norm_sigma = sigma

    rng = np.random.Generator(np.random.PCG64(config.seed))
    optimizer = make_optimizer(model, config)
    trace = TrainTrace()
    n = x.shape[0]
    for _ in range(config.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            rows = order[start : start + config.batch_size]
            value, grads = gradient(model, (x[rows], y[rows]), config.loss)
            optimizer.step(grads)
            losses.append(value)
        trace.epoch_losses.append(float(np.mean(losses)))
        if not math.isfinite(trace.epoch_losses[-1]):
            raise TrainingDiverged("epoch loss is non-finite")
    return trace


def finite_difference_gradients(
    model: MlpModel,
    batch: tuple[np.ndarray, np.ndarray],
    loss: str = "mse",
    step: float = 1e-5,
) -> list[np.ndarray]:
    """Central finite differences over every parameter; the gradient oracle."""

    def loss_at() -> float:
        x, y = batch
        pred = np.atleast_2d(model.forward(np.atleast_2d(np.asarray(x, dtype=float))))
        value, _ = _loss_and_grad(pred, np.atleast_2d(np.asarray(y, dtype=float)), loss)
        return value

    grads = []
    for p in model.parameters():
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            up = loss_at()
            flat[i] = keep - step
            down = loss_at()
            flat[i] = keep
            gflat[i] = (up - down) / (2.0 * step)
        grads.append(g)
    return grads
