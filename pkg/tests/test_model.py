"""Softmax classifier: determinism, tie-breaking, persistence, error paths."""

import numpy as np
import pytest

from hcat.errors import DataError, SchemaError
from hcat.features import FeatureVector
from hcat.model import (
    CLASS_NAMES,
    Hyper,
    load_model,
    predict,
    predict_batch,
    save_model,
    train,
)
from hcat.records import TweetLabel


def fv(values, schema="toy"):
    return FeatureVector(np.asarray(values, dtype=np.float64), schema)


def separable_examples(n_per_class=10, noise=0.05, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for cls in range(3):
        base = np.zeros(4)
        base[cls] = 5.0
        for _ in range(n_per_class):
            out.append((fv(base + noise * rng.standard_normal(4)), cls))
    return out


def test_untrained_weights_give_uniform_probs_and_hate_tiebreak():
    examples = [(fv([1.0, 0.0]), 0), (fv([0.0, 1.0]), 1), (fv([1.0, 1.0]), 2)]
    model = train(examples, hyper=Hyper(epochs=0))
    assert np.all(model.weights == 0.0) and np.all(model.bias == 0.0)
    label, probs = predict(model, fv([3.0, -2.0]))
    assert probs == pytest.approx([1 / 3, 1 / 3, 1 / 3])
    assert label == TweetLabel.HATE  # argmax tie resolves to class 0


def test_training_is_bitwise_deterministic():
    examples = separable_examples()
    h = Hyper(batch_size=4, epochs=5, learning_rate=0.1)
    m1 = train(examples, hyper=h, seed=3)
    m2 = train(examples, hyper=h, seed=3)
    assert np.array_equal(m1.weights, m2.weights)
    assert np.array_equal(m1.bias, m2.bias)


def test_seed_changes_minibatch_order_and_weights():
    examples = separable_examples()
    h = Hyper(batch_size=2, epochs=1, learning_rate=0.1)
    m1 = train(examples, hyper=h, seed=0)
    m2 = train(examples, hyper=h, seed=1)
    assert not np.array_equal(m1.weights, m2.weights)


def test_model_learns_separable_data():
    examples = separable_examples()
    model = train(examples, hyper=Hyper(batch_size=4, epochs=50, learning_rate=0.1))
    X = np.stack([e[0].values for e in examples])
    y = np.array([e[1] for e in examples])
    assert np.array_equal(predict_batch(model, X), y)
    label, probs = predict(model, examples[0][0])
    assert label == TweetLabel.HATE
    assert probs.shape == (3,) and probs.sum() == pytest.approx(1.0)


def test_training_meta_is_recorded():
    h = Hyper(batch_size=4, epochs=2, learning_rate=0.25)
    model = train(separable_examples(n_per_class=3), hyper=h, seed=11)
    assert model.training_meta == {
        "batch_size": 4,
        "epochs": 2,
        "learning_rate": 0.25,
        "seed": 11,
    }
    assert model.dim == 4


def test_train_requires_examples_and_all_classes():
    with pytest.raises(DataError):
        train([])
    two_class = [(fv([1.0]), 0), (fv([2.0]), 1)]
    with pytest.raises(DataError, match="neutral"):
        train(two_class)


def test_train_rejects_mixed_schemas():
    examples = [
        (fv([1.0, 0.0], "a"), 0),
        (fv([0.0, 1.0], "b"), 1),
        (fv([1.0, 1.0], "a"), 2),
    ]
    with pytest.raises(SchemaError):
        train(examples)


def test_non_finite_loss_is_reported():
    examples = [(fv([1e200]), 0), (fv([-1e200]), 1), (fv([1e200]), 2)]
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(DataError, match="non-finite"):
            train(examples, hyper=Hyper(batch_size=8, epochs=3, learning_rate=1e200))


def test_predict_rejects_schema_mismatch():
    model = train(
        [(fv([1.0, 0.0]), 0), (fv([0.0, 1.0]), 1), (fv([1.0, 1.0]), 2)],
        hyper=Hyper(epochs=0),
    )
    with pytest.raises(SchemaError):
        predict(model, fv([1.0, 0.0], schema="other"))
    with pytest.raises(SchemaError):
        predict(model, fv([1.0, 0.0, 3.0]))
    with pytest.raises(SchemaError):
        predict_batch(model, np.zeros((2, 5)))


def test_save_load_round_trip_is_exact(tmp_path):
    model = train(
        separable_examples(), hyper=Hyper(batch_size=4, epochs=7, learning_rate=0.05), seed=9
    )
    path = str(tmp_path / "model.txt")
    save_model(model, path)
    loaded = load_model(path)
    assert np.array_equal(loaded.weights, model.weights)
    assert np.array_equal(loaded.bias, model.bias)
    assert loaded.schema_id == model.schema_id
    assert loaded.training_meta == model.training_meta

    text = (tmp_path / "model.txt").read_text()
    assert text.startswith("schema_id toy\n")
    assert f"classes {' '.join(CLASS_NAMES)}\n" in text


def test_load_model_rejects_incomplete_or_malformed(tmp_path):
    p = tmp_path / "broken.txt"
    p.write_text("schema_id toy\n")
    with pytest.raises(DataError, match="incomplete"):
        load_model(str(p))

    p.write_text("schema_id toy\nclasses hate neutral\n")
    with pytest.raises(DataError, match="class list"):
        load_model(str(p))

    two = " ".join(float(x).hex() for x in (0.0, 1.0))
    p.write_text(f"schema_id toy\nbias {two}\nw {two}\n")
    with pytest.raises(DataError, match="class count"):
        load_model(str(p))
