"""Classifier evaluation: per-class precision/recall/F1 and k-fold CV."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from hcat.errors import DataError
from hcat.features import FeatureVector
from hcat.model import CLASS_NAMES, N_CLASSES, Hyper, predict_batch, train
from hcat.records import TweetLabel


@dataclass
class EvalReport:
    precision: np.ndarray  # (3,)
    recall: np.ndarray  # (3,)
    f1: np.ndarray  # (3,)
    confusion: np.ndarray  # (3, 3) rows = true, cols = predicted
    n_examples: int
    n_folds: int = 1
    per_fold_f1: list = field(default_factory=list)

    @property
    def macro_f1(self) -> float:
        return float(np.mean(self.f1))

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion) / max(1, self.confusion.sum()))


def eval_metrics(y_true: Sequence[int], y_pred: Sequence[int]) -> EvalReport:
    """Per-class precision/recall/F1 from parallel label sequences.

    A class with no predicted (or no true) instances gets precision
    (recall) 0, and F1 is 0 whenever precision + recall is 0.
    """
    yt = np.asarray(y_true, dtype=np.int64)
    yp = np.asarray(y_pred, dtype=np.int64)
    if yt.shape != yp.shape:
        raise DataError(f"length mismatch: {yt.shape[0]} true vs {yp.shape[0]} predicted")
    if yt.size == 0:
        raise DataError("empty evaluation set")
    for arr, name in ((yt, "true"), (yp, "predicted")):
        if arr.min() < 0 or arr.max() >= N_CLASSES:
            raise DataError(f"{name} labels outside 0..{N_CLASSES - 1}")

    conf = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(conf, (yt, yp), 1)

    tp = np.diag(conf).astype(np.float64)
    pred_tot = conf.sum(axis=0).astype(np.float64)
    true_tot = conf.sum(axis=1).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(pred_tot > 0, tp / pred_tot, 0.0)
        recall = np.where(true_tot > 0, tp / true_tot, 0.0)
    pr = precision + recall
    f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    return EvalReport(precision, recall, f1, conf, int(yt.size))


def _stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Index arrays for k folds with near-equal class balance."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in range(N_CLASSES):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        for pos, i in enumerate(idx):
            folds[pos % k].append(int(i))
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def cross_validate(
    examples: Sequence[tuple[FeatureVector, TweetLabel | int]],
    n_folds: int = 5,
    hyper: Hyper | None = None,
    seed: int = 0,
) -> EvalReport:
    """Stratified k-fold CV; metrics averaged over folds, confusion summed.

    Each fold trains on the other k-1 folds with the given
    hyperparameters and a fold-specific training seed derived from
    *seed*, so the whole procedure is deterministic.
    """
    if n_folds < 2:
        raise DataError(f"need at least 2 folds, got {n_folds}")
    if len(examples) < n_folds:
        raise DataError(f"{len(examples)} examples cannot fill {n_folds} folds")
    y = np.array([int(lbl) for _, lbl in examples], dtype=np.int64)
    counts = np.bincount(y, minlength=N_CLASSES)
    if (counts < n_folds).any():
        lacking = [CLASS_NAMES[c] for c in range(N_CLASSES) if counts[c] < n_folds]
        raise DataError(
            f"class(es) {', '.join(lacking)} have fewer examples than folds"
        )

    folds = _stratified_folds(y, n_folds, seed)
    conf_total = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    per_fold = []
    prec_acc = np.zeros(N_CLASSES)
    rec_acc = np.zeros(N_CLASSES)
    f1_acc = np.zeros(N_CLASSES)
    for fold_i, test_idx in enumerate(folds):
        test_set = set(test_idx.tolist())
        train_ex = [ex for i, ex in enumerate(examples) if i not in test_set]
        model = train(train_ex, hyper=hyper, seed=seed + 1000 * (fold_i + 1))
        X_test = np.stack([examples[i][0].values for i in test_idx])
        y_pred = predict_batch(model, X_test)
        rep = eval_metrics(y[test_idx], y_pred)
        conf_total += rep.confusion
        prec_acc += rep.precision
        rec_acc += rep.recall
        f1_acc += rep.f1
        per_fold.append(rep.f1.copy())

    return EvalReport(
        prec_acc / n_folds,
        rec_acc / n_folds,
        f1_acc / n_folds,
        conf_total,
        int(y.size),
        n_folds=n_folds,
        per_fold_f1=per_fold,
    )


def write_metrics_csv(report: EvalReport, path: str) -> None:
    """Rows: one per class plus a macro row; columns precision,recall,f1."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["class", "precision", "recall", "f1"])
        for c in range(N_CLASSES):
            w.writerow(
                [
                    CLASS_NAMES[c],
                    f"{report.precision[c]:.6f}",
                    f"{report.recall[c]:.6f}",
                    f"{report.f1[c]:.6f}",
                ]
            )
        w.writerow(
            [
                "macro",
                f"{np.mean(report.precision):.6f}",
                f"{np.mean(report.recall):.6f}",
                f"{report.macro_f1:.6f}",
            ]
        )


def write_confusion_csv(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["true\\pred"] + list(CLASS_NAMES))
        for c in range(N_CLASSES):
            w.writerow([CLASS_NAMES[c]] + [int(x) for x in report.confusion[c]])
