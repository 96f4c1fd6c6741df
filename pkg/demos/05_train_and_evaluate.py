"""Train a classifier on a generated corpus and print top-k metrics.

Defaults to the bidirectional LSTM (arch C); ``A`` and ``B`` need many more
epochs at the default learning rate before they beat chance.

Run: python demos/05_train_and_evaluate.py [A|B|C]
"""
import sys
import tempfile
from pathlib import Path

from sigtype.evaluation import evaluate, format_table
from sigtype.extract import extract_corpus, load_manifest
from sigtype.neural import ModelConfig, TrainConfig, predict_top_k, train
from sigtype.pipeline import prepare
from sigtype.synthetic import CorpusSpec, write_corpus

arch = sys.argv[1] if len(sys.argv) > 1 else "C"
with tempfile.TemporaryDirectory() as tmp:
    functions = extract_corpus(load_manifest(write_corpus(Path(tmp), CorpusSpec(n_functions=1200), seed=2)))

data = prepare(functions, variant=1, seed=0)
print(f"{len(data.x_train)} training matrices of shape {data.x_train.shape[1:]}")

config = ModelConfig(arch, data.vocab.size, input_dim=data.dim, seq_len=data.seq_len)
model = train(config, TrainConfig(epochs=25, batch_size=32), data.x_train,
              data.y_train, data.vocab)
print(f"loss {model.loss_curve[0]:.3f} -> {model.loss_curve[-1]:.3f}")

report = evaluate(model, data.x_test, data.y_test)
print(format_table([report]))

dp = data.split.test[0]
print("\ntrue:", dp.label, "| predicted:", predict_top_k(model, data.x_test[0], 3))
