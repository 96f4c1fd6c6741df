"""Type vocabulary, one-hot labels and fixed-layout input matrices.

Both datapoint kinds share one row layout::

    kind | sep | block0 | sep | block1 | sep | block2 | sep | block3 | sep | block4

Parameter datapoints fill block0 (name) and block1 (comment) and leave the
remaining blocks as zero padding; return datapoints fill all five. With the
default budgets this is a 55 x 14 matrix.
"""
from __future__ import annotations

import hashlib
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sigtype.dataset import Datapoint, get_variant
from sigtype.errors import EmptyDataset, MalformedFile

OTHER = "other"
TENSOR_MAGIC = b"DLTV"
_HEADER = struct.Struct("<4sIII")


@dataclass(frozen=True)
class FeatureBudget:
    name: int = 6
    comment: int = 15
    return_comment: int = 6
    return_exprs: int = 12
    param_names: int = 10
    param_name: int = 6
    param_comment: int = 15

    def blocks(self, kind: str) -> list[tuple[str | None, int, str]]:
        """(token field, length, embedding kind) per block; field None means padding."""
        if kind == "parameter":
            return [
                ("name", self.param_name, "identifier"),
                ("comment", self.param_comment, "comment"),
                (None, self.return_comment, "comment"),
                (None, self.return_exprs, "identifier"),
                (None, self.param_names, "identifier"),
            ]
        return [
            ("fname", self.name, "identifier"),
            ("fcomment", self.comment, "comment"),
            ("rcomment", self.return_comment, "comment"),
            ("retexprs", self.return_exprs, "identifier"),
            ("paramnames", self.param_names, "identifier"),
        ]

    def rows(self, kind: str = "return") -> int:
        return 1 + sum(1 + length for _, length, _ in self.blocks(kind))

    def separator_rows(self, kind: str = "return") -> list[int]:
        rows, pos = [], 1
        for _, length, _ in self.blocks(kind):
            rows.append(pos)
            pos += 1 + length
        return rows

    def block_rows(self, kind: str, index: int) -> slice:
        start = self.separator_rows(kind)[index] + 1
        return slice(start, start + self.blocks(kind)[index][1])

    def check_aligned(self) -> None:
        if [b[1] for b in self.blocks("parameter")] != [b[1] for b in self.blocks("return")]:
            raise ValueError("parameter and return layouts must have equal block lengths")


DEFAULT_BUDGET = FeatureBudget()
RETURN_EXPR_BLOCK = 3


@dataclass
class TypeVocabulary:
    types: list[str]

    def __post_init__(self):
        self._index = {t: i for i, t in enumerate(self.types)}

    @property
    def index_of_other(self) -> int:
        return len(self.types)

    @property
    def size(self) -> int:
        """Length of the one-hot encoding (frequent types plus ``other``)."""
        return len(self.types) + 1

    def index(self, label: str) -> int:
        return self._index.get(label, self.index_of_other)

    def decode(self, index: int) -> str:
        return self.types[index] if index < len(self.types) else OTHER

    def text(self) -> str:
        return "".join(t + "\n" for t in self.types)

    def digest(self) -> str:
        return hashlib.sha256(self.text().encode("utf-8")).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(self.text(), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path) -> TypeVocabulary:
        text = Path(path).read_text(encoding="utf-8")
        return cls([line for line in text.split("\n") if line])


def build_type_vocabulary(train_points: list[Datapoint], cap: int = 1000) -> TypeVocabulary:
    """Top ``cap`` training labels by frequency, ties broken lexicographically.

    ``Any`` and ``None`` never enter the vocabulary; they encode as ``other``.
    """
    if not train_points:
        raise EmptyDataset("cannot build a type vocabulary from no datapoints")
    counts = Counter(dp.label for dp in train_points if dp.label not in ("Any", "None"))
    ranked = sorted(counts, key=lambda t: (-counts[t], t))
    return TypeVocabulary(ranked[:cap])


def encode_type(vocab: TypeVocabulary, label: str) -> np.ndarray:
    vec = np.zeros(vocab.size, dtype=np.float32)
    vec[vocab.index(label)] = 1.0
    return vec


def embed_feature(tokens, budget: int, model) -> np.ndarray:
    """Embed the first ``budget`` tokens row-wise; pad with zero rows."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    block = np.zeros((budget, model.dim), dtype=np.float32)
    for row, token in enumerate(list(tokens)[:budget]):
        i = model.index(token)
        if i is not None:
            block[row] = model.vectors[i]
    return block


def _dim(models) -> int:
    dims = {models["comment"].dim, models["identifier"].dim}
    if len(dims) != 1:
        raise ValueError(f"embedding models disagree on dimension: {sorted(dims)}")
    return dims.pop()


def _vectorize(dp: Datapoint, models, budget: FeatureBudget) -> np.ndarray:
    dim = _dim(models)
    m = np.zeros((budget.rows(dp.kind), dim), dtype=np.float32)
    m[0, 0 if dp.kind == "parameter" else 1] = 1.0
    pos = 1
    for field_name, length, model_kind in budget.blocks(dp.kind):
        m[pos] = 1.0
        if field_name is not None:
            m[pos + 1:pos + 1 + length] = embed_feature(dp.tokens.get(field_name, ()), length,
                                                        models[model_kind])
        pos += 1 + length
    return m


def vectorize_parameter(dp: Datapoint, models, budget: FeatureBudget = DEFAULT_BUDGET) -> np.ndarray:
    if dp.kind != "parameter":
        raise ValueError("expected a parameter datapoint")
    return _vectorize(dp, models, budget)


def vectorize_return(dp: Datapoint, models, budget: FeatureBudget = DEFAULT_BUDGET) -> np.ndarray:
    if dp.kind != "return":
        raise ValueError("expected a return datapoint")
    return _vectorize(dp, models, budget)


def apply_variant(m: np.ndarray, variant, budget: FeatureBudget = DEFAULT_BUDGET) -> np.ndarray:
    """Zero (variant 4) or remove (variant 5) the return-expression rows."""
    variant = get_variant(variant)
    if not (variant.zero_return_exprs or variant.drop_return_expr_rows):
        return m
    block = budget.block_rows("return", RETURN_EXPR_BLOCK)
    if variant.drop_return_expr_rows:
        return np.delete(m, np.r_[block.start - 1:block.stop], axis=0)
    m = m.copy()
    m[block] = 0.0
    return m


def vectorize(dp: Datapoint, models, variant=1, budget: FeatureBudget = DEFAULT_BUDGET) -> np.ndarray:
    return apply_variant(_vectorize(dp, models, budget), variant, budget)


def input_rows(variant, budget: FeatureBudget = DEFAULT_BUDGET) -> int:
    rows = budget.rows()
    if get_variant(variant).drop_return_expr_rows:
        rows -= budget.return_exprs + 1
    return rows


def build_tensors(points, models, vocab: TypeVocabulary, variant=1,
                  budget: FeatureBudget = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Stack datapoints into an ``(N, rows, dim)`` float32 array and uint32 labels."""
    rows, dim = input_rows(variant, budget), _dim(models)
    x = np.zeros((len(points), rows, dim), dtype=np.float32)
    for i, dp in enumerate(points):
        x[i] = vectorize(dp, models, variant, budget)
    y = np.array([vocab.index(dp.label) for dp in points], dtype=np.uint32)
    return x, y


def write_tensors(x: np.ndarray, path) -> None:
    x = np.ascontiguousarray(x, dtype="<f4")
    if x.ndim != 3:
        raise ValueError("tensor file holds a (count, rows, cols) array")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TENSOR_MAGIC, *x.shape))
        fh.write(x.tobytes())


def read_tensors(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise MalformedFile(f"{path}: truncated tensor header")
    magic, count, rows, cols = _HEADER.unpack_from(data)
    if magic != TENSOR_MAGIC:
        raise MalformedFile(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * count * rows * cols
    if len(data) != expected:
        raise MalformedFile(f"{path}: expected {expected} bytes, found {len(data)}")
    return np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(count, rows, cols).astype(np.float32)


def write_labels(y: np.ndarray, path) -> None:
    Path(path).write_bytes(np.ascontiguousarray(y, dtype="<u4").tobytes())


def read_labels(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) % 4:
        raise MalformedFile(f"{path}: label file size is not a multiple of 4")
    return np.frombuffer(data, dtype="<u4").astype(np.int64)
