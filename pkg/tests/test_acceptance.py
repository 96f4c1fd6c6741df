"""Acceptance criteria, one test each.

Every test records a PASS or FAIL line through the ``criterion`` fixture;
the lines are repeated in a summary section at the end of the pytest run.
"""
import itertools
import math

import numpy as np
import pytest

from sigtype.cli import EXIT_OK, main
from sigtype.dataset import get_variant
from sigtype.embed import EmbeddingConfig, embedding_dim, train_embeddings
from sigtype.evaluation import evaluate, run_experiment
from sigtype.extract import extract_corpus, load_manifest
from sigtype.neural import LSTM, GRU, Linear, ModelConfig, TrainConfig, accuracy, param_count, softmax, train
from sigtype.nlp import lemmatize, normalize_text, preprocess_comment, preprocess_identifier, split_identifier
from sigtype.pipeline import prepare
from sigtype.synthetic import CorpusSpec, write_corpus
from sigtype.vectorize import DEFAULT_BUDGET, build_tensors

import test_nlp
from test_embed import cosine, synonym_corpus
from test_evaluation import FixedModel, check, probs_from_rankings
from test_neural import TOL, check_layer, instances


@pytest.fixture(scope="module")
def desk_corpus(tmp_path_factory):
    """About 2,000 generated functions whose names and comments carry type cues."""
    root = tmp_path_factory.mktemp("desk")
    manifest = write_corpus(root, CorpusSpec(n_functions=2000), seed=0)
    return extract_corpus(load_manifest(manifest))


@pytest.fixture(scope="module")
def desk_v1(desk_corpus):
    return prepare(desk_corpus, 1, seed=0)


def test_parameter_counts(criterion):
    expected = {"A": 37_288, "B": 11_780, "C": 404_456}
    with criterion("parameter counts at input 14, output 1000") as info:
        got = {arch: param_count(ModelConfig(arch, 1000)) for arch in "ABC"}
        info["note"] = ", ".join(f"{a}={n:,}" for a, n in got.items())
        assert got == expected


def test_tensor_shapes(criterion, desk_v1):
    with criterion("datapoint matrices are 55x14, variant 5 is 42x14") as info:
        points = desk_v1.split.test[:50]
        assert {dp.kind for dp in points} == {"parameter", "return"}
        shapes = {}
        for vid in (1, 2, 3, 4, 5):
            x, _ = build_tensors(points, desk_v1.models, desk_v1.vocab, get_variant(vid), DEFAULT_BUDGET)
            shapes[vid] = x.shape[1:]
        info["note"] = " ".join(f"v{v}={r}x{c}" for v, (r, c) in shapes.items())
        assert all(shapes[v] == (55, 14) for v in (1, 2, 3, 4))
        assert shapes[5] == (42, 14)


def test_preprocessing_golden_suite(criterion):
    tables = [
        (test_nlp.NORMALIZE_CASES, normalize_text),
        (test_nlp.SPLIT_CASES, split_identifier),
        (test_nlp.LEMMA_CASES, lemmatize),
        (test_nlp.COMMENT_CASES, lambda t: preprocess_comment(t).tokens),
        (test_nlp.IDENTIFIER_CASES, lambda t: preprocess_identifier(t).tokens),
    ]
    with criterion("preprocessing golden suite", budget=1.0) as info:
        assert normalize_text("object.property") == "object property"
        assert lemmatize("removing") == lemmatize("removed") == "remove"
        assert "is" in preprocess_identifier("is_valid").tokens
        assert "is" not in preprocess_comment("is valid").tokens
        cases = 0
        for table, fn in tables:
            for given, expected in table:
                assert fn(given) == expected, given
                cases += 1
        info["note"] = f"{cases} golden cases"
        assert cases - 4 >= 30


def test_metrics_oracle(criterion):
    with criterion("metrics match brute force on every set of up to 10 points", budget=1.0) as info:
        model = FixedModel(1)
        outcomes = [(r, lab) for r in ((0, 1), (1, 0)) for lab in (0, 1)]
        sets = 0
        for n in range(1, 11):
            for combo in itertools.combinations_with_replacement(outcomes, n):
                check(model, [c[0] for c in combo], [c[1] for c in combo])
                sets += 1
        # p=4, p_valid=3, two correct
        worked = FixedModel(2)
        rankings = [[0, 1, 2], [1, 0, 2], [0, 1, 2], [2, 0, 1]]
        labels = [0, 1, 1, 0]
        x = np.zeros((4, 1, 3), np.float32)
        x[:, 0, :] = probs_from_rankings(rankings)
        report = evaluate(worked, x, np.array(labels), ks=(1,))
        assert (report.counts.p, report.counts.p_valid, report.counts.p_valid_correct[1]) == (4, 3, 2)
        assert report.precision[1] == 2 / 3 and report.recall[1] == 1 / 2
        assert math.isclose(report.f1[1], 4 / 7, rel_tol=0, abs_tol=1e-15)
        info["note"] = f"{sets} exhaustive sets plus the 2/3, 1/2, 4/7 example"


def test_gradient_checks(criterion):
    with criterion("finite-difference gradients for LSTM, GRU, linear", budget=60.0) as info:
        worst = {}
        for name, cell in (("LSTM", LSTM), ("GRU", GRU)):
            worst[name] = 0.0
            for rng, batch, steps, n_in, hidden in instances(100):
                layer = cell(n_in, hidden, rng, np.float64)
                x = rng.standard_normal((batch, steps, n_in))
                worst[name] = max(worst[name], check_layer(layer, x, rng))
        worst["linear"] = 0.0
        for rng, batch, _, n_in, n_out in instances(100):
            layer = Linear(n_in, n_out, rng, np.float64)
            worst["linear"] = max(worst["linear"], check_layer(layer, rng.standard_normal((batch, n_in)), rng))
        info["note"] = "worst relative error " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        assert max(worst.values()) <= TOL


def test_softmax_normalization(criterion):
    with criterion("softmax rows sum to 1 within 1e-6") as info:
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(200):
            rows, cols = int(rng.integers(1, 64)), int(rng.integers(2, 1002))
            z = (rng.standard_normal((rows, cols)) * rng.uniform(0.1, 50)).astype(np.float32)
            worst = max(worst, float(np.max(np.abs(softmax(z).sum(axis=1) - 1.0))))
        info["note"] = f"max deviation {worst:.1e}"
        assert worst <= 1e-6


def test_embedding_properties(criterion):
    with criterion("embedding min-count boundary, synonym margin, dimension rule") as info:
        model = train_embeddings([["five"]] * 5 + [["six"]] * 6, 4, EmbeddingConfig(epochs=1))
        assert "six" in model and "five" not in model
        syn = train_embeddings(synonym_corpus(), 14, EmbeddingConfig(seed=1))
        v = syn.vocab
        margin = cosine(v["alpha"], v["beta"]) - np.mean(
            [cosine(v["alpha"], v[f"t{k}_0"]) for k in range(1, 8)])
        assert embedding_dim(38_416) == 14
        info["note"] = f"synonym margin {margin:.3f}"
        assert margin >= 0.2


def test_desk_scale_end_to_end(criterion, desk_corpus, desk_v1):
    with criterion("desk-scale: C v1 top-3 recall >= 0.80 and v1 beats v3 on top-1 F1", budget=900.0) as info:
        v1 = run_experiment("C", 1, desk_corpus, repetitions=1, seeds=[0], prepared={0: desk_v1})
        v3 = run_experiment("C", 3, desk_corpus, repetitions=1, seeds=[0])
        info["note"] = (f"v1 top-3 recall {v1.recall[3]:.3f}, top-1 F1 v1 {v1.f1[1]:.3f} "
                        f"vs v3 {v3.f1[1]:.3f}")
        assert v1.recall[3] >= 0.80
        assert v1.f1[1] > v3.f1[1]


def test_overfit_sanity(criterion, desk_v1):
    with criterion("arch A memorizes 100 training points to >= 95%", budget=120.0) as info:
        x, y = desk_v1.x_train[:100], desk_v1.y_train[:100]
        config = ModelConfig("A", desk_v1.vocab.size, input_dim=desk_v1.dim, seq_len=desk_v1.seq_len)
        model = train(config, TrainConfig(epochs=800, batch_size=50, learning_rate=3e-3), x, y, desk_v1.vocab)
        acc = accuracy(model, x, y)
        info["note"] = f"training accuracy {acc:.3f}"
        assert acc >= 0.95


def test_pipeline_determinism(criterion, tmp_path):
    manifest = write_corpus(tmp_path / "corpus", CorpusSpec(n_functions=200), seed=3)
    cfg = tmp_path / "run.ini"
    cfg.write_text("[embedding]\nepochs = 2\n\n[train]\nbatch_size = 64\n", encoding="utf-8")

    def pipeline(wd):
        common = ["--config", cfg, "--workdir", wd, "--seed", 7]
        for args in (["extract", manifest], ["build", "--variant", 1],
                     ["train", "--arch", "C", "--epochs", 2], ["eval"]):
            assert main([str(a) for a in common + args]) == EXIT_OK
        return {p.name: p.read_bytes() for p in sorted(wd.iterdir())}

    with criterion("two seeded pipeline runs are byte-identical") as info:
        first, second = pipeline(tmp_path / "run1"), pipeline(tmp_path / "run2")
        assert {"train.tensors", "test.tensors", "model.ckpt", "report.csv"} <= set(first)
        assert first.keys() == second.keys()
        differing = sorted(name for name in first if first[name] != second[name])
        info["note"] = f"{len(first)} files compared"
        assert not differing, differing
