"""Deterministic training loop with gradient accumulation.

The loop minimizes mean cross-entropy. Parameters are (re)initialized from
the run's seed so that a training run is a pure function of (seed, config,
dataset order): shuffling uses the same generator, gradients accumulate over
a fixed number of mini-batches before each update, and per-epoch losses are
summed in dataset index order so equal runs produce byte-equal histories.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .ioutil import atomic_write, fmt
from .neural import INIT_SCALE

OPTIMIZERS = ("sgd", "adam")


@dataclass(frozen=True)
class TrainConfig:
    rng_seed: int
    batch_size: int = 24
    epochs: int = 20
    learning_rate: float = 1e-3
    accumulation_steps: int = 16
    optimizer: str = "adam"

    def __post_init__(self):
        for name in ("batch_size", "epochs", "accumulation_steps"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        # 0 is admitted so frozen-parameter runs stay expressible
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")


class Sgd:
    def __init__(self, tensors: dict, learning_rate: float):
        self.tensors = tensors
        self.learning_rate = learning_rate

    def step(self, grads: dict) -> None:
        for name, arr in self.tensors.items():
            arr -= self.learning_rate * grads[name]


class Adam:
    def __init__(self, tensors: dict, learning_rate: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.tensors = tensors
        self.learning_rate = learning_rate
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {name: np.zeros_like(arr) for name, arr in tensors.items()}
        self.v = {name: np.zeros_like(arr) for name, arr in tensors.items()}
        self.t = 0

    def step(self, grads: dict) -> None:
        self.t += 1
        bias1 = 1.0 - self.beta1**self.t
        bias2 = 1.0 - self.beta2**self.t
        for name, arr in self.tensors.items():
            g = grads[name]
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            m_hat = self.m[name] / bias1
            v_hat = self.v[name] / bias2
            arr -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def _make_optimizer(name: str, tensors: dict, learning_rate: float):
    return Adam(tensors, learning_rate) if name == "adam" else Sgd(tensors, learning_rate)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


def train(model, dataset, config: TrainConfig):
    """Fit in place; returns (model, per-epoch history).

    `dataset` rows are (encoder output, sentiment vectors or None, label).
    Labels are validated before any parameter is touched.
    """
    dataset = list(dataset)
    if not dataset:
        raise DataError("training dataset is empty")
    class_count = model.config.class_count
    for row, (_, _, label) in enumerate(dataset):
        if not isinstance(label, (int, np.integer)) or not 0 <= label < class_count:
            raise DataError(f"sample {row}: label must be in [0, {class_count}), got {label!r}")
    rng = np.random.default_rng(config.rng_seed)
    tensors = model.param_tensors()
    for arr in tensors.values():
        arr[...] = rng.uniform(-INIT_SCALE, INIT_SCALE, size=arr.shape)
    optimizer = _make_optimizer(config.optimizer, tensors, config.learning_rate)
    count = len(dataset)
    history = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(count)
        losses = np.zeros(count, dtype=np.float64)
        correct = 0
        sums = {name: np.zeros_like(arr) for name, arr in tensors.items()}
        window_samples = 0
        window_batches = 0

        def flush():
            nonlocal window_samples, window_batches
            if window_samples == 0:
                return
            mean = {name: g / window_samples for name, g in sums.items()}
            optimizer.step(mean)
            for g in sums.values():
                g[...] = 0.0
            window_samples = 0
            window_batches = 0

        for start in range(0, count, config.batch_size):
            batch = order[start : start + config.batch_size]
            for idx in batch:
                enc, sv, label = dataset[int(idx)]
                loss, probs, grads = model.loss_and_gradients(enc, sv, int(label))
                losses[int(idx)] = loss
                if int(np.argmax(probs)) == int(label):
                    correct += 1
                for name, g in grads.items():
                    sums[name] += g
            window_samples += len(batch)
            window_batches += 1
            if window_batches == config.accumulation_steps:
                flush()
        flush()
        history.append(
            EpochStats(epoch=epoch, loss=float(np.sum(losses)) / count, accuracy=correct / count)
        )
    return model, history


def write_history(history, path) -> None:
    with atomic_write(path) as handle:
        handle.write("epoch,loss,accuracy\n")
        for row in history:
            handle.write(f"{row.epoch},{fmt(row.loss)},{fmt(row.accuracy)}\n")
