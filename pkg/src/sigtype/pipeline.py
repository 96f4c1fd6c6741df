"""From extracted functions to train/test tensors for one dataset variant."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from sigtype.dataset import Datapoint, SplitDataset, build_datapoints, get_variant, split_train_test
from sigtype.embed import DEFAULT_DIM, EmbeddingConfig, EmbeddingModel, build_sentences, embedding_dim, train_embeddings
from sigtype.vectorize import DEFAULT_BUDGET, FeatureBudget, TypeVocabulary, build_tensors, build_type_vocabulary

log = logging.getLogger(__name__)


@dataclass
class PreparedData:
    variant: int
    split: SplitDataset
    vocab: TypeVocabulary
    models: dict[str, EmbeddingModel]
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    budget: FeatureBudget = DEFAULT_BUDGET

    @property
    def seq_len(self) -> int:
        return self.x_train.shape[1]

    @property
    def dim(self) -> int:
        return self.x_train.shape[2]


def train_embedding_pair(points: list[Datapoint], config: EmbeddingConfig | None = None,
                         dim: int | None = DEFAULT_DIM) -> dict[str, EmbeddingModel]:
    """Comment and identifier embeddings over ``points``.

    ``dim=None`` derives the dimension from the number of distinct words.
    """
    config = config or EmbeddingConfig()
    comments, identifiers = build_sentences(points)
    if dim is None:
        unique = {tok for sent in comments + identifiers for tok in sent}
        dim = embedding_dim(max(1, len(unique)))
    return {
        "comment": train_embeddings(comments, dim, config, kind="comment"),
        "identifier": train_embeddings(identifiers, dim, dataclasses.replace(config, seed=config.seed + 1),
                                       kind="identifier"),
    }


def prepare(functions, variant, seed: int = 0, *, embed_config: EmbeddingConfig | None = None,
            dim: int | None = DEFAULT_DIM, budget: FeatureBudget = DEFAULT_BUDGET,
            by_project: bool = False, cap: int = 1000, points: list[Datapoint] | None = None) -> PreparedData:
    """Select, explode, split, embed and vectorize ``functions`` under one variant.

    The type vocabulary and both embeddings are fitted on the training split
    only. ``seed`` drives the split; the embedding seed comes from
    ``embed_config``, replaced by ``seed`` when none is given.
    """
    variant = get_variant(variant)
    if points is None:
        points = build_datapoints(functions, variant)
    split = split_train_test(points, 0.8, seed, by_project=by_project)
    vocab = build_type_vocabulary(split.train, cap)
    embed_config = embed_config or EmbeddingConfig(seed=seed)
    models = train_embedding_pair(split.train, embed_config, dim)
    x_train, y_train = build_tensors(split.train, models, vocab, variant, budget)
    x_test, y_test = build_tensors(split.test, models, vocab, variant, budget)
    log.info("variant %d: %d train / %d test datapoints, %d types",
             variant.id, len(split.train), len(split.test), len(vocab.types))
    return PreparedData(variant.id, split, vocab, models, x_train, y_train.astype(np.int64),
                        x_test, y_test.astype(np.int64), budget)
