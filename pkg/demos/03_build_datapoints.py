"""Generate a labelled toy corpus and explode it into datapoints per variant.

Run: python demos/03_build_datapoints.py
"""
import tempfile
from collections import Counter
from pathlib import Path

from sigtype.dataset import build_datapoints, split_train_test
from sigtype.extract import extract_corpus, load_manifest
from sigtype.synthetic import CorpusSpec, write_corpus

with tempfile.TemporaryDirectory() as tmp:
    manifest = write_corpus(Path(tmp), CorpusSpec(n_functions=300), seed=1)
    functions = extract_corpus(load_manifest(manifest))

print(len(functions), "functions extracted")
for variant in range(1, 6):
    points = build_datapoints(functions, variant)
    split = split_train_test(points, 0.8, seed=0)
    kinds = Counter(dp.kind for dp in points)
    print(f"variant {variant}: {len(points)} datapoints {dict(kinds)}, "
          f"{len(split.train)} train / {len(split.test)} test")

example = build_datapoints(functions, 1)[0]
print("\nfirst datapoint:", example.label, example.tokens)
