"""Softmax cross-entropy training with Adam, prediction and top-K queries."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from sigtype.errors import EmptyDataset, NonFiniteLoss, ShapeMismatch
from sigtype.neural.models import ModelConfig, Network
from sigtype.vectorize import TypeVocabulary

log = logging.getLogger(__name__)

DEFAULT_EPOCHS = {"A": 100, "B": 100, "C": 25}


@dataclass(frozen=True)
class TrainConfig:
    epochs: int | None = None
    batch_size: int = 256
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def epochs_for(self, arch: str) -> int:
        return self.epochs if self.epochs is not None else DEFAULT_EPOCHS[arch]


@dataclass
class TrainedModel:
    config: ModelConfig
    network: Network
    vocab: TypeVocabulary
    seed: int = 0
    epochs: int = 0
    loss_curve: list[float] = field(default_factory=list)
    train_config: dict = field(default_factory=dict)
    variant: int = 1

    def __post_init__(self):
        if self.vocab.size != self.config.output_dim:
            raise ShapeMismatch(
                f"vocabulary encodes {self.vocab.size} classes but the model outputs "
                f"{self.config.output_dim}"
            )


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss(probs, labels) -> float:
    """Mean negative log-probability of the true class."""
    labels = np.asarray(labels)
    p = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.maximum(p, np.finfo(probs.dtype).tiny))))


def _network(model):
    return model.network if isinstance(model, TrainedModel) else model


def forward(model, batch) -> np.ndarray:
    """Class probabilities, one row per input matrix."""
    net = _network(model)
    x = np.asarray(batch, dtype=next(iter(net.params.values())).dtype)
    logits, _ = net.logits(x)
    return softmax(logits)


def backward(model, batch, labels, upstream: float = 1.0):
    """Gradients of ``upstream * loss(forward(batch), labels)`` for every parameter."""
    net = _network(model)
    x = np.asarray(batch, dtype=next(iter(net.params.values())).dtype)
    labels = np.asarray(labels)
    logits, caches = net.logits(x)
    dlogits = softmax(logits)
    dlogits[np.arange(len(labels)), labels] -= 1.0
    dlogits *= upstream / len(labels)
    grads, _ = net.backward(dlogits, caches)
    return grads


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        scale = self.lr * np.sqrt(1.0 - b2 ** self.t) / (1.0 - b1 ** self.t)
        for name, p in self.params.items():
            g = grads[name]
            m, v = self.m[name], self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= (scale * m / (np.sqrt(v) + self.eps)).astype(p.dtype)


def train(config: ModelConfig, tc: TrainConfig, x, y, vocab: TypeVocabulary,
          variant: int = 1, callback=None) -> TrainedModel:
    """Run ``epochs`` passes of shuffled minibatch Adam over ``(x, y)``.

    Shuffling and initialization are driven by ``tc.seed`` alone, so a fixed
    seed reproduces identical parameters.
    """
    x = np.asarray(x, dtype=np.float32)
    y = np.asarray(y, dtype=np.int64)
    if len(x) == 0:
        raise EmptyDataset("no training tensors")
    net = Network(config, seed=tc.seed)
    net._check(x)
    params = net.params
    opt = Adam(params, tc.learning_rate, tc.beta1, tc.beta2, tc.eps)
    rng = np.random.default_rng(tc.seed + 1)
    epochs = tc.epochs_for(config.arch)
    curve = []
    for epoch in range(epochs):
        order = rng.permutation(len(x))
        total = 0.0
        for b, start in enumerate(range(0, len(x), tc.batch_size)):
            sel = order[start:start + tc.batch_size]
            xb, yb = x[sel], y[sel]
            logits, caches = net.logits(xb)
            probs = softmax(logits)
            value = loss(probs, yb)
            if not np.isfinite(value):
                raise NonFiniteLoss(epoch, b, value)
            total += value * len(sel)
            dlogits = probs
            dlogits[np.arange(len(sel)), yb] -= 1.0
            dlogits /= len(sel)
            grads, _ = net.backward(dlogits, caches)
            opt.step(grads)
        curve.append(total / len(x))
        log.debug("arch %s epoch %d loss %.5f", config.arch, epoch + 1, curve[-1])
        if callback is not None:
            callback(epoch, curve[-1])
    return TrainedModel(config, net, vocab, seed=tc.seed, epochs=epochs, loss_curve=curve,
                        train_config=asdict(tc), variant=variant)


def predict_proba(model, x, batch_size: int = 512) -> np.ndarray:
    x = np.asarray(x, dtype=np.float32)
    if len(x) == 0:
        return np.zeros((0, _network(model).config.output_dim), dtype=np.float32)
    return np.concatenate([forward(model, x[i:i + batch_size]) for i in range(0, len(x), batch_size)])


def rank_classes(probs) -> np.ndarray:
    """Class indices per row by descending probability; ties go to the lower index."""
    return np.argsort(-probs, axis=1, kind="stable")


def predict_top_k(model: TrainedModel, m, k: int) -> list[tuple[str, float]]:
    """The ``k`` most likely types for one input matrix, most likely first."""
    if not 1 <= k <= model.config.output_dim:
        raise ValueError(f"k must be in [1, {model.config.output_dim}]")
    m = np.asarray(m, dtype=np.float32)
    probs = forward(model, m[None])[0]
    order = rank_classes(probs[None])[0][:k]
    return [(model.vocab.decode(int(i)), float(probs[i])) for i in order]


def accuracy(model, x, y) -> float:
    probs = predict_proba(model, x)
    return float(np.mean(probs.argmax(axis=1) == np.asarray(y)))
