"""Evaluation metrics against hand-computed confusion fixtures."""

import numpy as np
import pytest

from hcat.errors import DataError
from hcat.evaluation import (
    _stratified_folds,
    cross_validate,
    eval_metrics,
    write_confusion_csv,
    write_metrics_csv,
)
from hcat.features import FeatureVector
from hcat.model import Hyper

# Hand tally for this pair:
#   true 0 at positions 0,1,2,9 -> predicted 0,1,0,0
#   true 1 at positions 3,4     -> predicted 1,2
#   true 2 at positions 5,6,7,8 -> predicted 2,2,0,2
Y_TRUE = [0, 0, 0, 1, 1, 2, 2, 2, 2, 0]
Y_PRED = [0, 1, 0, 1, 2, 2, 2, 0, 2, 0]
CONFUSION = np.array([[3, 1, 0], [0, 1, 1], [1, 0, 3]])


def test_eval_metrics_hand_fixture():
    rep = eval_metrics(Y_TRUE, Y_PRED)
    assert np.array_equal(rep.confusion, CONFUSION)
    assert rep.precision == pytest.approx([3 / 4, 1 / 2, 3 / 4])
    assert rep.recall == pytest.approx([3 / 4, 1 / 2, 3 / 4])
    assert rep.f1 == pytest.approx([3 / 4, 1 / 2, 3 / 4])
    assert rep.macro_f1 == pytest.approx(2 / 3)
    assert rep.accuracy == pytest.approx(0.7)
    assert rep.n_examples == 10
    assert rep.n_folds == 1


def test_eval_metrics_perfect_and_degenerate():
    perfect = eval_metrics([0, 1, 2, 1], [0, 1, 2, 1])
    assert perfect.precision == pytest.approx([1, 1, 1])
    assert perfect.macro_f1 == pytest.approx(1.0)

    # nothing predicted as class 0, nothing truly class 1: both get 0, never NaN
    rep = eval_metrics([0, 0, 2], [1, 1, 2])
    assert np.all(np.isfinite(rep.precision))
    assert rep.precision == pytest.approx([0, 0, 1])
    assert rep.recall == pytest.approx([0, 0, 1])
    assert rep.f1 == pytest.approx([0, 0, 1])


def test_eval_metrics_error_paths():
    with pytest.raises(DataError, match="length mismatch"):
        eval_metrics([0, 1], [0])
    with pytest.raises(DataError, match="empty"):
        eval_metrics([], [])
    with pytest.raises(DataError):
        eval_metrics([0, 3], [0, 0])
    with pytest.raises(DataError):
        eval_metrics([0, 0], [-1, 0])


def fv(values):
    return FeatureVector(np.asarray(values, dtype=np.float64), "toy")


def separable(n_per_class=8, seed=5):
    rng = np.random.default_rng(seed)
    out = []
    for cls in range(3):
        base = np.zeros(3)
        base[cls] = 4.0
        for _ in range(n_per_class):
            out.append((fv(base + 0.05 * rng.standard_normal(3)), cls))
    return out


def test_stratified_folds_partition_with_balanced_classes():
    y = np.array([0] * 7 + [1] * 5 + [2] * 6)
    folds = _stratified_folds(y, 3, seed=0)
    merged = np.concatenate(folds)
    assert np.array_equal(np.sort(merged), np.arange(y.size))
    for cls in range(3):
        per_fold = [int(np.sum(y[f] == cls)) for f in folds]
        assert max(per_fold) - min(per_fold) <= 1


def test_cross_validate_separable_data():
    examples = separable()
    rep = cross_validate(
        examples, n_folds=4, hyper=Hyper(batch_size=4, epochs=40, learning_rate=0.1), seed=1
    )
    assert rep.n_folds == 4
    assert rep.n_examples == 24
    assert rep.confusion.sum() == 24  # every example tested exactly once
    assert len(rep.per_fold_f1) == 4
    assert all(f.shape == (3,) for f in rep.per_fold_f1)
    assert rep.macro_f1 >= 0.95


def test_cross_validate_is_deterministic():
    examples = separable()
    h = Hyper(batch_size=4, epochs=10, learning_rate=0.1)
    r1 = cross_validate(examples, n_folds=3, hyper=h, seed=2)
    r2 = cross_validate(examples, n_folds=3, hyper=h, seed=2)
    assert np.array_equal(r1.confusion, r2.confusion)
    assert np.array_equal(r1.f1, r2.f1)
    assert all(np.array_equal(a, b) for a, b in zip(r1.per_fold_f1, r2.per_fold_f1))


def test_cross_validate_input_validation():
    examples = separable(n_per_class=3)
    with pytest.raises(DataError, match="at least 2 folds"):
        cross_validate(examples, n_folds=1)
    with pytest.raises(DataError, match="cannot fill"):
        cross_validate(examples[:4], n_folds=5)
    lopsided = separable(n_per_class=5)[:12]  # classes 0,1 full, class 2 has 2
    with pytest.raises(DataError, match="neutral"):
        cross_validate(lopsided, n_folds=3)


def test_metrics_csv_layout(tmp_path):
    rep = eval_metrics(Y_TRUE, Y_PRED)
    mpath = tmp_path / "metrics.csv"
    write_metrics_csv(rep, str(mpath))
    lines = mpath.read_text().splitlines()
    assert lines[0] == "class,precision,recall,f1"
    assert lines[1] == "hate,0.750000,0.750000,0.750000"
    assert lines[2] == "counterspeech,0.500000,0.500000,0.500000"
    assert lines[3] == "neutral,0.750000,0.750000,0.750000"
    assert lines[4] == "macro,0.666667,0.666667,0.666667"

    cpath = tmp_path / "confusion.csv"
    write_confusion_csv(rep, str(cpath))
    lines = cpath.read_text().splitlines()
    assert lines[0] == "true\\pred,hate,counterspeech,neutral"
    assert lines[1] == "hate,3,1,0"
    assert lines[2] == "counterspeech,0,1,1"
    assert lines[3] == "neutral,1,0,3"
