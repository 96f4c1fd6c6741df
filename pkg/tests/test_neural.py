import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigtype.errors import MalformedFile, NonFiniteLoss, ShapeMismatch, VocabHashMismatch
from sigtype.neural import (
    GRU,
    LSTM,
    Adam,
    Bidirectional,
    Linear,
    ModelConfig,
    Network,
    TrainConfig,
    accuracy,
    backward,
    forward,
    gate_param_count,
    load_checkpoint,
    loss,
    param_count,
    predict_top_k,
    rank_classes,
    read_header,
    save_checkpoint,
    softmax,
    train,
)
from sigtype.vectorize import TypeVocabulary

EPS = 1e-4
TOL = 1e-4


def rel_err(a, b):
    denom = np.linalg.norm(a) + np.linalg.norm(b)
    return 0.0 if denom == 0 else float(np.linalg.norm(a - b) / denom)


def numeric_grad(f, arr, indices=None):
    """Central differences of scalar ``f()`` with respect to ``arr`` (perturbed in place)."""
    grad = np.zeros_like(arr)
    flat, gflat = arr.reshape(-1), grad.reshape(-1)
    for i in (range(flat.size) if indices is None else indices):
        keep = flat[i]
        flat[i] = keep + EPS
        up = f()
        flat[i] = keep - EPS
        down = f()
        flat[i] = keep
        gflat[i] = (up - down) / (2 * EPS)
    return grad


def check_layer(layer, x, rng):
    y, _ = layer.forward(x)
    weights = rng.standard_normal(y.shape)

    def f():
        return float(np.sum(layer.forward(x)[0] * weights))

    y, cache = layer.forward(x)
    dx, grads = layer.backward(weights, cache)
    worst = rel_err(dx, numeric_grad(f, x))
    for name, arr in layer.params.items():
        worst = max(worst, rel_err(grads[name], numeric_grad(f, arr)))
    return worst


def instances(n=100):
    rng = np.random.default_rng(1234)
    for _ in range(n):
        yield rng, int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(1, 4)), int(rng.integers(1, 4))


@pytest.mark.parametrize("cell", [LSTM, GRU])
@pytest.mark.parametrize("reverse", [False, True])
def test_recurrent_gradients(cell, reverse):
    worst = 0.0
    for rng, batch, steps, n_in, hidden in instances():
        layer = cell(n_in, hidden, rng, np.float64, reverse=reverse)
        x = rng.standard_normal((batch, steps, n_in))
        worst = max(worst, check_layer(layer, x, rng))
    assert worst <= TOL, worst


def test_linear_gradients():
    worst = 0.0
    for rng, batch, _, n_in, n_out in instances():
        layer = Linear(n_in, n_out, rng, np.float64)
        worst = max(worst, check_layer(layer, rng.standard_normal((batch, n_in)), rng))
    assert worst <= TOL, worst


def test_bidirectional_gradients():
    worst = 0.0
    for rng, batch, steps, n_in, hidden in instances(30):
        layer = Bidirectional(LSTM, n_in, hidden, rng, np.float64)
        worst = max(worst, check_layer(layer, rng.standard_normal((batch, steps, n_in)), rng))
    assert worst <= TOL, worst


@pytest.mark.parametrize("arch", ["A", "B", "C"])
def test_full_network_gradients(arch):
    rng = np.random.default_rng(7)
    config = ModelConfig(arch, 5, input_dim=3, seq_len=4)
    net = Network(config, seed=3, dtype=np.float64)
    x = rng.standard_normal((3, 4, 3))
    y = rng.integers(0, 5, 3)

    def f():
        return loss(forward(net, x), y)

    grads = backward(net, x, y)
    for name, arr in net.params.items():
        idx = rng.choice(arr.size, size=min(arr.size, 25), replace=False)
        num = numeric_grad(f, arr, idx).reshape(-1)[idx]
        assert rel_err(grads[name].reshape(-1)[idx], num) <= TOL, name


def test_softmax_rows_sum_to_one():
    rng = np.random.default_rng(0)
    for _ in range(50):
        z = rng.standard_normal((int(rng.integers(1, 40)), int(rng.integers(2, 1002)))).astype(np.float32) * 30
        p = softmax(z)
        assert np.all(np.abs(p.sum(axis=1) - 1.0) <= 1e-6)
        assert np.all(p >= 0)


def test_softmax_is_shift_invariant_and_stable():
    z = np.array([[1000.0, 1001.0, 1002.0]])
    assert np.allclose(softmax(z), softmax(z - 1000.0))
    assert np.isfinite(softmax(z)).all()


@pytest.mark.parametrize("arch, total", [("A", 37_288), ("B", 11_780), ("C", 404_456)])
def test_parameter_counts(arch, total):
    config = ModelConfig(arch, 1000, input_dim=14)
    assert param_count(config) == total
    assert Network(config).size() == total


def test_gate_counts():
    assert gate_param_count("lstm", 14, 14) == 1680
    assert gate_param_count("gru", 14, 10) == 780


def test_shape_mismatch():
    net = Network(ModelConfig("B", 3))
    with pytest.raises(ShapeMismatch):
        net.logits(np.zeros((2, 42, 14), np.float32))


def test_adam_matches_closed_form_first_step():
    p = {"w": np.array([1.0, -2.0])}
    opt = Adam(p, lr=0.1)
    opt.step({"w": np.array([0.5, -0.25])})
    # first Adam step moves each weight by lr * sign(g), up to eps
    assert np.allclose(p["w"], [0.9, -1.9], atol=1e-6)


def small_task(n=40, classes=3, rows=55):
    rng = np.random.default_rng(0)
    y = rng.integers(0, classes, n)
    x = rng.standard_normal((n, rows, 14)).astype(np.float32) * 0.1
    x[np.arange(n), 3, y] += 2.0
    return x, y, TypeVocabulary([f"t{i}" for i in range(classes - 1)])


def test_training_reduces_loss_and_is_deterministic():
    x, y, vocab = small_task()
    tc = TrainConfig(epochs=5, batch_size=8, learning_rate=1e-2, seed=4)
    a = train(ModelConfig("B", 3), tc, x, y, vocab)
    b = train(ModelConfig("B", 3), tc, x, y, vocab)
    assert a.loss_curve[-1] < a.loss_curve[0]
    assert a.loss_curve == b.loss_curve
    for k in a.network.params:
        assert np.array_equal(a.network.params[k], b.network.params[k])


def test_non_finite_loss_is_reported():
    x, y, vocab = small_task(8)
    x[0, 0, 0] = np.nan
    with pytest.raises(NonFiniteLoss) as info:
        train(ModelConfig("B", 3), TrainConfig(epochs=1, batch_size=8), x, y, vocab)
    assert info.value.epoch == 0 and info.value.batch == 0


def test_vocab_size_must_match_output():
    x, y, vocab = small_task(8)
    with pytest.raises(ShapeMismatch):
        train(ModelConfig("B", 7), TrainConfig(epochs=1), x, y, vocab)


def test_default_epochs():
    assert TrainConfig().epochs_for("A") == 100
    assert TrainConfig().epochs_for("B") == 100
    assert TrainConfig().epochs_for("C") == 25
    assert TrainConfig(epochs=1).epochs_for("C") == 1


def test_rank_classes_ties_prefer_lower_index():
    assert rank_classes(np.array([[0.2, 0.4, 0.4]])).tolist() == [[1, 2, 0]]


def test_predict_top_k():
    x, y, vocab = small_task()
    model = train(ModelConfig("B", 3), TrainConfig(epochs=2, batch_size=8, learning_rate=1e-2), x, y, vocab)
    top = predict_top_k(model, x[0], 3)
    assert len(top) == 3
    assert sorted(t for t, _ in top) == ["other", "t0", "t1"]
    probs = [p for _, p in top]
    assert probs == sorted(probs, reverse=True) and abs(sum(probs) - 1) < 1e-5
    with pytest.raises(ValueError):
        predict_top_k(model, x[0], 4)


def test_checkpoint_round_trip(tmp_path):
    x, y, vocab = small_task()
    model = train(ModelConfig("A", 3), TrainConfig(epochs=1, batch_size=16), x, y, vocab, variant=2)
    save_checkpoint(model, tmp_path / "m.ckpt", {"config_hash": "abc"})
    back = load_checkpoint(tmp_path / "m.ckpt", vocab)
    assert back.variant == 2 and back.epochs == 1 and back.loss_curve == model.loss_curve
    assert np.array_equal(forward(back, x), forward(model, x))
    assert read_header(tmp_path / "m.ckpt")["config_hash"] == "abc"
    save_checkpoint(back, tmp_path / "n.ckpt", {"config_hash": "abc"})
    assert (tmp_path / "m.ckpt").read_bytes() == (tmp_path / "n.ckpt").read_bytes()


def test_checkpoint_refuses_other_vocabulary(tmp_path):
    x, y, vocab = small_task(8)
    model = train(ModelConfig("B", 3), TrainConfig(epochs=1), x, y, vocab)
    save_checkpoint(model, tmp_path / "m.ckpt")
    with pytest.raises(VocabHashMismatch):
        load_checkpoint(tmp_path / "m.ckpt", TypeVocabulary(["x", "y"]))


def test_checkpoint_corruption(tmp_path):
    x, y, vocab = small_task(8)
    save_checkpoint(train(ModelConfig("B", 3), TrainConfig(epochs=1), x, y, vocab), tmp_path / "m.ckpt")
    data = (tmp_path / "m.ckpt").read_bytes()
    for bad in (b"NOPE" + data[4:], data[:-3], data + b"\0"):
        (tmp_path / "bad.ckpt").write_bytes(bad)
        with pytest.raises(MalformedFile):
            load_checkpoint(tmp_path / "bad.ckpt", vocab)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(2, 12), st.sampled_from(["A", "B", "C"]))
def test_forward_output_is_a_distribution(batch, out, arch):
    net = Network(ModelConfig(arch, out, input_dim=2, seq_len=5))
    p = forward(net, np.random.default_rng(batch).standard_normal((batch, 5, 2)))
    assert p.shape == (batch, out)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-6)


def test_accuracy_helper():
    x, y, vocab = small_task()
    model = train(ModelConfig("B", 3), TrainConfig(epochs=1), x, y, vocab)
    assert 0.0 <= accuracy(model, x, y) <= 1.0


def test_bidirectional_readout_is_symmetric_under_time_reversal():
    # reversing the input and swapping the two directions (and the dense rows
    # they feed) must leave the arch C prediction unchanged
    rng = np.random.default_rng(5)
    config = ModelConfig("C", 4, input_dim=3, seq_len=6)
    net = Network(config, seed=2, dtype=np.float64)
    mirror = Network(config, seed=2, dtype=np.float64)
    rnn, mrnn = net.layers["rnn1"], mirror.layers["rnn1"]
    for name in rnn.fwd.params:
        mrnn.fwd.params[name][...] = rnn.bwd.params[name]
        mrnn.bwd.params[name][...] = rnn.fwd.params[name]
    h = config.hidden
    w = net.layers["fc"].params["W"]
    mirror.layers["fc"].params["W"][...] = np.concatenate([w[h:], w[:h]])
    mirror.layers["fc"].params["b"][...] = net.layers["fc"].params["b"]
    x = rng.standard_normal((2, 6, 3))
    assert np.allclose(forward(net, x), forward(mirror, x[:, ::-1]), atol=1e-12)
