"""Recurrent type classifiers with hand-written backpropagation through time."""
from sigtype.neural.checkpoint import load_checkpoint, read_header, save_checkpoint
from sigtype.neural.layers import GRU, LSTM, Bidirectional, Linear
from sigtype.neural.models import ModelConfig, Network, gate_param_count, param_count
from sigtype.neural.training import (
    Adam,
    TrainConfig,
    TrainedModel,
    accuracy,
    backward,
    forward,
    loss,
    predict_proba,
    predict_top_k,
    rank_classes,
    softmax,
    train,
)

__all__ = [
    "Adam",
    "Bidirectional",
    "GRU",
    "LSTM",
    "Linear",
    "ModelConfig",
    "Network",
    "TrainConfig",
    "TrainedModel",
    "accuracy",
    "backward",
    "forward",
    "gate_param_count",
    "load_checkpoint",
    "loss",
    "param_count",
    "predict_proba",
    "predict_top_k",
    "rank_classes",
    "read_header",
    "save_checkpoint",
    "softmax",
    "train",
]
