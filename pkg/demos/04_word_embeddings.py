"""Train skip-gram embeddings and look at nearest neighbours.

Run: python demos/04_word_embeddings.py
"""
import numpy as np

from sigtype.embed import EmbeddingConfig, lookup, train_embeddings

rng = np.random.default_rng(0)
groups = {
    "count": ["number", "total", "size", "integer"],
    "name": ["string", "text", "label", "title"],
    "flag": ["enable", "toggle", "boolean", "whether"],
}
corpus = []
for _ in range(3000):
    head = str(rng.choice(list(groups)))
    corpus.append([head] + [str(w) for w in rng.choice(groups[head], 3)])

model = train_embeddings(corpus, dim=8, config=EmbeddingConfig(seed=0))


def nearest(word, k=3):
    v = lookup(model, word)
    sims = model.vectors @ v / (np.linalg.norm(model.vectors, axis=1) * np.linalg.norm(v))
    order = [model.words[i] for i in np.argsort(-sims) if model.words[i] != word]
    return order[:k]


for word in groups:
    print(word, "->", nearest(word))
print("unseen word maps to", lookup(model, "unseen"))
