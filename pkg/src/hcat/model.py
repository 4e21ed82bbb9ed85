"""One-layer softmax classifier over feature vectors.

Trained with minibatch gradient descent on cross-entropy. Defaults
follow the reference setup (batch size 8, 3 epochs, learning rate
1e-5); tests and callers override for their data scale. Training is
bitwise deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hcat.errors import DataError, SchemaError
from hcat.features import FeatureVector
from hcat.records import TweetLabel

N_CLASSES = 3
CLASS_NAMES = ("hate", "counterspeech", "neutral")

DEFAULT_BATCH_SIZE = 8
DEFAULT_EPOCHS = 3
DEFAULT_LEARNING_RATE = 1e-5


@dataclass
class Hyper:
    batch_size: int = DEFAULT_BATCH_SIZE
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE


@dataclass
class ClassifierModel:
    weights: np.ndarray  # (dim, 3)
    bias: np.ndarray  # (3,)
    schema_id: str
    training_meta: dict

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _as_xy(examples: Sequence[tuple[FeatureVector, TweetLabel | int]]):
    if not examples:
        raise DataError("no training examples")
    schema = examples[0][0].schema_id
    dim = examples[0][0].values.shape[0]
    X = np.empty((len(examples), dim), dtype=np.float64)
    y = np.empty(len(examples), dtype=np.int64)
    for i, (fv, label) in enumerate(examples):
        if fv.schema_id != schema or fv.values.shape[0] != dim:
            raise SchemaError(
                f"inconsistent feature schema: {fv.schema_id} vs {schema}"
            )
        X[i] = fv.values
        y[i] = int(label)
    return X, y, schema


def train(
    examples: Sequence[tuple[FeatureVector, TweetLabel | int]],
    hyper: Hyper | None = None,
    seed: int = 0,
) -> ClassifierModel:
    """Fit the softmax model; every class must appear in *examples*."""
    hyper = hyper or Hyper()
    X, y, schema = _as_xy(examples)
    present = set(y.tolist())
    missing = [CLASS_NAMES[c] for c in range(N_CLASSES) if c not in present]
    if missing:
        raise DataError(f"missing class in training data: {', '.join(missing)}")

    n, dim = X.shape
    W = np.zeros((dim, N_CLASSES), dtype=np.float64)
    b = np.zeros(N_CLASSES, dtype=np.float64)
    onehot = np.eye(N_CLASSES, dtype=np.float64)[y]
    rng = np.random.default_rng(seed)
    step = 0
    for _ in range(hyper.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hyper.batch_size):
            idx = order[start : start + hyper.batch_size]
            Xb, Yb = X[idx], onehot[idx]
            probs = _softmax(Xb @ W + b)
            loss = -np.sum(Yb * np.log(np.clip(probs, 1e-300, None))) / len(idx)
            if not np.isfinite(loss):
                raise DataError(f"non-finite training loss at step {step}")
            grad = (probs - Yb) / len(idx)
            W -= hyper.learning_rate * (Xb.T @ grad)
            b -= hyper.learning_rate * grad.sum(axis=0)
            step += 1

    meta = {
        "batch_size": hyper.batch_size,
        "epochs": hyper.epochs,
        "learning_rate": hyper.learning_rate,
        "seed": seed,
    }
    return ClassifierModel(W, b, schema, meta)


def predict(model: ClassifierModel, features: FeatureVector) -> tuple[TweetLabel, np.ndarray]:
    """(label, class probabilities). Ties break by class order hate < counterspeech < neutral."""
    if features.schema_id != model.schema_id or features.values.shape[0] != model.dim:
        raise SchemaError(
            f"features {features.schema_id}({features.values.shape[0]}) do not match "
            f"model {model.schema_id}({model.dim})"
        )
    probs = _softmax(features.values @ model.weights + model.bias)
    return TweetLabel(int(np.argmax(probs))), probs


def predict_batch(model: ClassifierModel, X: np.ndarray) -> np.ndarray:
    """Predicted class indices for a feature matrix (ties as in predict)."""
    if X.shape[1] != model.dim:
        raise SchemaError(f"feature matrix dim {X.shape[1]} != model dim {model.dim}")
    probs = _softmax(X @ model.weights + model.bias)
    return np.argmax(probs, axis=1)


def save_model(model: ClassifierModel, path: str) -> None:
    """Persist as a flat text document, full float precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"schema_id {model.schema_id}\n")
        fh.write(f"classes {' '.join(CLASS_NAMES)}\n")
        for key in ("batch_size", "epochs", "learning_rate", "seed"):
            fh.write(f"{key} {model.training_meta.get(key)!r}\n")
        fh.write("bias " + " ".join(float(x).hex() for x in model.bias) + "\n")
        for row in model.weights:
            fh.write("w " + " ".join(float(x).hex() for x in row) + "\n")


def load_model(path: str) -> ClassifierModel:
    meta: dict = {}
    schema_id = None
    bias = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, rest = line.rstrip("\n").partition(" ")
            if key == "schema_id":
                schema_id = rest
            elif key == "classes":
                if rest.split() != list(CLASS_NAMES):
                    raise DataError(f"unexpected class list in model file: {rest}")
            elif key in ("batch_size", "epochs", "seed"):
                meta[key] = int(rest) if rest != "None" else None
            elif key == "learning_rate":
                meta[key] = float(rest) if rest != "None" else None
            elif key == "bias":
                bias = np.array([float.fromhex(t) for t in rest.split()])
            elif key == "w":
                rows.append([float.fromhex(t) for t in rest.split()])
    if schema_id is None or bias is None or not rows:
        raise DataError(f"incomplete model file {path!r}")
    W = np.array(rows, dtype=np.float64)
    if W.shape[1] != N_CLASSES or bias.shape[0] != N_CLASSES:
        raise DataError("model file has wrong class count")
    return ClassifierModel(W, bias, schema_id, meta)
