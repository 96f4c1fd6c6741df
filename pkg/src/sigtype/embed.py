"""Skip-gram word embeddings with negative sampling, trained from scratch.

Two models are trained per dataset: one over comment token sequences and one
over identifier token sequences (function names, parameter names and
return-expression tokens).
"""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from sigtype.errors import EmptyVocabulary, MalformedFile

DEFAULT_DIM = 14


@dataclass(frozen=True)
class EmbeddingConfig:
    window: int = 5
    min_count_exclusive: int = 5
    epochs: int = 15
    negative: int = 5
    alpha: float = 0.025
    min_alpha: float = 0.0001
    batch_size: int = 64
    ns_exponent: float = 0.75
    seed: int = 0


@dataclass
class EmbeddingModel:
    kind: str
    dim: int
    words: list[str]
    vectors: np.ndarray
    config: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float32).reshape(len(self.words), self.dim)
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def vocab(self) -> dict[str, np.ndarray]:
        return {w: self.vectors[i] for w, i in self._index.items()}

    def __contains__(self, word):
        return word in self._index

    def __len__(self):
        return len(self.words)

    def index(self, word) -> int | None:
        return self._index.get(word)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update("\n".join(self.words).encode("utf-8"))
        h.update(self.vectors.astype("<f4").tobytes())
        return h.hexdigest()


def embedding_dim(unique_word_count: int) -> int:
    """Fourth root of the vocabulary size, rounded, at least 1."""
    if unique_word_count < 1:
        raise ValueError("unique_word_count must be >= 1")
    return max(1, round(unique_word_count ** 0.25))


def build_sentences(datapoints):
    """Route datapoint token fields into (comment_corpus, identifier_corpus)."""
    comments, identifiers = [], []
    for dp in datapoints:
        if dp.kind == "parameter":
            id_fields, comment_fields = ("name",), ("comment",)
        else:
            id_fields, comment_fields = ("fname", "retexprs", "paramnames"), ("fcomment", "rcomment")
        identifiers.extend(list(dp.tokens[f]) for f in id_fields if dp.tokens.get(f))
        comments.extend(list(dp.tokens[f]) for f in comment_fields if dp.tokens.get(f))
    return comments, identifiers


def _training_pairs(sentences, window):
    centers, contexts = [], []
    for sent in sentences:
        n = len(sent)
        if n < 2:
            continue
        for offset in range(1, window + 1):
            if offset >= n:
                break
            left, right = sent[:-offset], sent[offset:]
            centers.extend((left, right))
            contexts.extend((right, left))
    if not centers:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def train_embeddings(corpus, dim: int = DEFAULT_DIM, config: EmbeddingConfig | None = None,
                     kind: str = "comment") -> EmbeddingModel:
    """Train skip-gram vectors over ``corpus`` (a list of token lists).

    Words seen ``config.min_count_exclusive`` times or fewer are dropped
    before windowing. Updates are applied in fixed-size minibatches of
    (center, context) pairs in a seeded order, so training is deterministic.
    """
    config = config or EmbeddingConfig()
    counts = Counter(tok for sent in corpus for tok in sent)
    kept = sorted((w for w, c in counts.items() if c > config.min_count_exclusive),
                  key=lambda w: (-counts[w], w))
    if not kept:
        raise EmptyVocabulary(f"no {kind} word occurs more than {config.min_count_exclusive} times")
    index = {w: i for i, w in enumerate(kept)}
    sentences = [np.array([index[t] for t in sent if t in index], dtype=np.int64) for sent in corpus]
    centers, contexts = _training_pairs(sentences, config.window)

    rng = np.random.default_rng(config.seed)
    vocab_size = len(kept)
    w_in = (rng.random((vocab_size, dim)) - 0.5) / dim
    w_out = np.zeros((vocab_size, dim))
    freq = np.array([counts[w] for w in kept], dtype=np.float64) ** config.ns_exponent
    noise_cdf = np.cumsum(freq / freq.sum())

    n_pairs = len(centers)
    batch = config.batch_size
    steps_per_epoch = -(-n_pairs // batch) if n_pairs else 0
    total = max(1, steps_per_epoch * config.epochs)
    step = 0
    for _ in range(config.epochs if n_pairs else 0):
        order = rng.permutation(n_pairs)
        for start in range(0, n_pairs, batch):
            lr = config.alpha - (config.alpha - config.min_alpha) * step / total
            step += 1
            sel = order[start:start + batch]
            c, o = centers[sel], contexts[sel]
            negs = np.searchsorted(noise_cdf, rng.random((len(sel), config.negative)))
            negs = np.minimum(negs, vocab_size - 1)
            v = w_in[c]
            u_pos = w_out[o]
            u_neg = w_out[negs]
            g_pos = 1.0 - _sigmoid(np.einsum("bd,bd->b", v, u_pos))
            g_neg = -_sigmoid(np.einsum("bd,bkd->bk", v, u_neg))
            grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
            np.add.at(w_out, o, lr * g_pos[:, None] * v)
            np.add.at(w_out, negs, lr * g_neg[:, :, None] * v[:, None, :])
            np.add.at(w_in, c, lr * grad_v)

    return EmbeddingModel(kind, dim, kept, w_in.astype(np.float32), config,
                          [counts[w] for w in kept])


def lookup(model: EmbeddingModel, word: str) -> np.ndarray:
    """Vector for ``word``; out-of-vocabulary words map to the zero vector."""
    i = model.index(word)
    if i is None:
        return np.zeros(model.dim, dtype=np.float32)
    return model.vectors[i].copy()


def save_embeddings(model: EmbeddingModel, path) -> None:
    """Write the classic word2vec text format (``<vocab_size> <dim>`` header)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(model.words)} {model.dim}\n")
        for word, vec in zip(model.words, model.vectors):
            fh.write(word + " " + " ".join(format(float(x), ".9g") for x in vec) + "\n")


def load_embeddings(path, kind: str = "comment") -> EmbeddingModel:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise MalformedFile(f"{path}: empty embedding file")
    try:
        size, dim = (int(x) for x in lines[0].split())
    except ValueError:
        raise MalformedFile(f"{path}: bad header {lines[0]!r}") from None
    body = [line for line in lines[1:] if line.strip()]
    if len(body) != size:
        raise MalformedFile(f"{path}: header declares {size} words, found {len(body)}")
    words, rows = [], []
    for line in body:
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise MalformedFile(f"{path}: expected {dim} values for {parts[0]!r}")
        words.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    vectors = np.array(rows, dtype=np.float32).reshape(size, dim)
    return EmbeddingModel(kind, dim, words, vectors)


def config_dict(config: EmbeddingConfig) -> dict:
    return asdict(config)
