"""Binary checkpoint files.

Layout (little-endian)::

    b"DLTC" | u32 version | u32 header_len | header (UTF-8 JSON)
    u32 tensor_count
    per tensor: u16 name_len | name | u32 rank | u32 dims[rank] | f32 data (row-major)

The JSON header records the architecture, dimensions, vocabulary hash, seed,
dataset variant, training settings and loss curve.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from sigtype.errors import MalformedFile, VocabHashMismatch
from sigtype.neural.models import ARCH_IDS, ModelConfig, Network
from sigtype.neural.training import TrainedModel
from sigtype.vectorize import TypeVocabulary

MAGIC = b"DLTC"
VERSION = 1


def save_checkpoint(model: TrainedModel, path, extra: dict | None = None) -> None:
    c = model.config
    header = {
        "arch": c.arch,
        "arch_id": ARCH_IDS[c.arch],
        "input_dim": c.input_dim,
        "seq_len": c.seq_len,
        "output_dim": c.output_dim,
        "vocab_hash": model.vocab.digest(),
        "seed": model.seed,
        "variant": model.variant,
        "epochs": model.epochs,
        "train_config": model.train_config,
        "loss_curve": model.loss_curve,
    }
    header.update(extra or {})
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    params = model.network.params
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<II", VERSION, len(blob)) + blob)
        fh.write(struct.pack("<I", len(params)))
        for name, arr in params.items():
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)) + encoded)
            fh.write(struct.pack(f"<I{arr.ndim}I", arr.ndim, *arr.shape))
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_header(path) -> dict:
    data = Path(path).read_bytes()
    return _parse(data, path)[0]


def _parse(data, path):
    if data[:4] != MAGIC:
        raise MalformedFile(f"{path}: not a checkpoint file")
    try:
        version, hlen = struct.unpack_from("<II", data, 4)
        if version != VERSION:
            raise MalformedFile(f"{path}: unsupported checkpoint version {version}")
        pos = 12
        header = json.loads(data[pos:pos + hlen].decode("utf-8"))
        pos += hlen
        (count,) = struct.unpack_from("<I", data, pos)
        pos += 4
        tensors = {}
        for _ in range(count):
            (nlen,) = struct.unpack_from("<H", data, pos)
            pos += 2
            name = data[pos:pos + nlen].decode("utf-8")
            pos += nlen
            (rank,) = struct.unpack_from("<I", data, pos)
            pos += 4
            dims = struct.unpack_from(f"<{rank}I", data, pos)
            pos += 4 * rank
            size = int(np.prod(dims)) if rank else 1
            arr = np.frombuffer(data, dtype="<f4", count=size, offset=pos).reshape(dims)
            pos += 4 * size
            tensors[name] = arr.astype(np.float32)
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        raise MalformedFile(f"{path}: corrupt checkpoint ({exc})") from None
    if pos != len(data):
        raise MalformedFile(f"{path}: {len(data) - pos} trailing bytes")
    return header, tensors


def load_checkpoint(path, vocab: TypeVocabulary) -> TrainedModel:
    """Rebuild a :class:`TrainedModel`; refuses a vocabulary with a different hash."""
    header, tensors = _parse(Path(path).read_bytes(), path)
    if header["vocab_hash"] != vocab.digest():
        raise VocabHashMismatch(
            f"{path}: checkpoint was trained on vocabulary {header['vocab_hash'][:12]}, "
            f"given {vocab.digest()[:12]}"
        )
    config = ModelConfig(header["arch"], header["output_dim"], header["input_dim"], header["seq_len"])
    net = Network(config)
    params = net.params
    if list(params) != list(tensors):
        raise MalformedFile(f"{path}: tensor names do not match architecture {config.arch}")
    for name, arr in params.items():
        if arr.shape != tensors[name].shape:
            raise MalformedFile(f"{path}: tensor {name} has shape {tensors[name].shape}, expected {arr.shape}")
        arr[...] = tensors[name]
    return TrainedModel(
        config, net, vocab,
        seed=header["seed"],
        epochs=header["epochs"],
        loss_curve=list(header["loss_curve"]),
        train_config=header["train_config"],
        variant=header["variant"],
    )
