"""The three recurrent classifiers and their parameter accounting.

* ``A``: two stacked bidirectional LSTMs (hidden 14 per direction); the full
  output sequence of the first feeds the second, whose final forward and
  final backward states feed a dense layer.
* ``B``: a unidirectional GRU (hidden 10); its final state feeds a dense layer.
* ``C``: one bidirectional LSTM (hidden 128 per direction); the final forward
  and final backward states are concatenated into a dense layer.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from sigtype.errors import ShapeMismatch
from sigtype.neural.layers import GRU, LSTM, Bidirectional, Linear

ARCH_IDS = {"A": 1, "B": 2, "C": 3}
HIDDEN = {"A": 14, "B": 10, "C": 128}


@dataclass(frozen=True)
class ModelConfig:
    arch: str
    output_dim: int
    input_dim: int = 14
    seq_len: int = 55

    def __post_init__(self):
        if self.arch not in ARCH_IDS:
            raise ValueError(f"unknown architecture {self.arch!r}; expected A, B or C")

    @property
    def hidden(self) -> int:
        return HIDDEN[self.arch]


def gate_param_count(kind: str, n_in: int, hidden: int) -> int:
    """Weights plus two bias vectors for every gate of one recurrent direction."""
    gates = {"lstm": 4, "gru": 3}[kind]
    return gates * ((n_in + hidden) * hidden + 2 * hidden)


def param_count(config: ModelConfig) -> int:
    h, d, out = config.hidden, config.input_dim, config.output_dim
    if config.arch == "A":
        rec = 2 * gate_param_count("lstm", d, h) + 2 * gate_param_count("lstm", 2 * h, h)
        feat = 2 * h
    elif config.arch == "B":
        rec = gate_param_count("gru", d, h)
        feat = h
    else:
        rec = 2 * gate_param_count("lstm", d, h)
        feat = 2 * h
    return rec + feat * out + out


def _final_states(seq, hidden):
    """Forward state after the last step joined with backward state after step 0."""
    return np.concatenate([seq[:, -1, :hidden], seq[:, 0, hidden:]], axis=1)


def _scatter_final_states(dseq, dfeat, hidden):
    dseq[:, -1, :hidden] = dfeat[:, :hidden]
    dseq[:, 0, hidden:] = dfeat[:, hidden:]


class Network:
    """Parameter container plus forward/backward for one architecture."""

    def __init__(self, config: ModelConfig, seed: int = 0, dtype=np.float32):
        self.config = config
        rng = np.random.default_rng(seed)
        h, d = config.hidden, config.input_dim
        if config.arch == "A":
            self.layers = OrderedDict(
                rnn1=Bidirectional(LSTM, d, h, rng, dtype),
                rnn2=Bidirectional(LSTM, 2 * h, h, rng, dtype),
                fc=Linear(2 * h, config.output_dim, rng, dtype),
            )
        elif config.arch == "B":
            self.layers = OrderedDict(
                rnn1=GRU(d, h, rng, dtype),
                fc=Linear(h, config.output_dim, rng, dtype),
            )
        else:
            self.layers = OrderedDict(
                rnn1=Bidirectional(LSTM, d, h, rng, dtype),
                fc=Linear(2 * h, config.output_dim, rng, dtype),
            )

    @property
    def params(self) -> OrderedDict:
        """Flat ``layer.name -> array`` view in a fixed order (arrays are shared)."""
        flat = OrderedDict()
        for lname, layer in self.layers.items():
            for pname, arr in layer.params.items():
                flat[f"{lname}.{pname}"] = arr
        return flat

    def size(self) -> int:
        return sum(a.size for a in self.params.values())

    def _check(self, x):
        c = self.config
        if x.ndim != 3 or x.shape[1:] != (c.seq_len, c.input_dim):
            raise ShapeMismatch(
                f"expected input (batch, {c.seq_len}, {c.input_dim}), got {tuple(x.shape)}"
            )

    def logits(self, x):
        self._check(x)
        arch = self.config.arch
        L = self.layers
        caches = {}
        h1, caches["rnn1"] = L["rnn1"].forward(x)
        if arch == "A":
            h2, caches["rnn2"] = L["rnn2"].forward(h1)
            feat = _final_states(h2, self.config.hidden)
        elif arch == "B":
            feat = h1[:, -1, :]
        else:
            feat = _final_states(h1, self.config.hidden)
        out, caches["fc"] = L["fc"].forward(feat)
        caches["shape"] = (x.shape, h1.shape)
        return out, caches

    def backward(self, dlogits, caches):
        """Gradients of every parameter and of the input given ``d loss / d logits``."""
        arch = self.config.arch
        L = self.layers
        grads = {}
        dfeat, grads["fc"] = L["fc"].backward(dlogits, caches["fc"])
        _, h1_shape = caches["shape"]
        dh1 = np.zeros(h1_shape, dtype=dlogits.dtype)
        if arch == "A":
            dh2 = np.zeros(h1_shape, dtype=dlogits.dtype)
            _scatter_final_states(dh2, dfeat, self.config.hidden)
            dh1, grads["rnn2"] = L["rnn2"].backward(dh2, caches["rnn2"])
        elif arch == "B":
            dh1[:, -1, :] = dfeat
        else:
            _scatter_final_states(dh1, dfeat, self.config.hidden)
        dx, grads["rnn1"] = L["rnn1"].backward(dh1, caches["rnn1"])
        flat = OrderedDict()
        for lname, layer in self.layers.items():
            for pname in layer.params:
                flat[f"{lname}.{pname}"] = grads[lname][pname]
        return flat, dx
