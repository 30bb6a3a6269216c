"""Small dense binary classifiers written directly on numpy.

Three architectures:

* ``A``: input -> 1 sigmoid unit (logistic regression).
* ``B``: input -> hidden ReLU layer -> 1 sigmoid unit.
* ``C``: ``B`` with inverted dropout on the inputs of the hidden and output layers.

Weight matrices are stored as ``(fan_out, fan_in)`` so ``z = W @ x + b``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .errors import (
    BadConfig,
    BadDropout,
    CorruptModel,
    DimensionMismatch,
    EmptyDataset,
    SchemaVersionMismatch,
    SpecMismatch,
)
from .features import FeatureSetSpec, Normalizer, extract_features, fit_normalizer

SCHEMA_VERSION = 1
ARCHS = ("A", "B", "C")
DEFAULT_DROPOUT = 0.2
EPS = 1e-12


MIN_HIDDEN = 4


def hidden_width(input_dim: int) -> int:
    # ceil(d/2) for the 12/14-input models; tiny inputs get MIN_HIDDEN units, since a
    # single ReLU unit into a sigmoid is still a linear classifier and 2-3 units train
    # unreliably on XOR
    return max(MIN_HIDDEN, math.ceil(input_dim / 2))


@dataclass
class Model:
    arch_id: str
    input_dim: int
    layers: list[tuple[np.ndarray, np.ndarray]]
    dropout_rate: float = 0.0
    rng_seed: int = 0

    def layer_sizes(self) -> list[int]:
        return [self.input_dim] + [W.shape[0] for W, _ in self.layers]

    def n_params(self) -> int:
        return sum(W.size + b.size for W, b in self.layers)


def build_model(arch_id: str, input_dim: int, dropout_rate: float | None = None,
                seed: int = 0) -> Model:
    if arch_id not in ARCHS:
        raise BadConfig(f"unknown architecture {arch_id!r}")
    if input_dim < 1:
        raise BadConfig(f"input_dim must be >= 1, got {input_dim}")
    if dropout_rate is None:
        dropout_rate = DEFAULT_DROPOUT if arch_id == "C" else 0.0
    if not 0 <= dropout_rate < 1:
        raise BadDropout(dropout_rate)
    if arch_id != "C" and dropout_rate != 0:
        raise BadConfig(f"architecture {arch_id} takes no dropout")

    sizes = [input_dim, 1] if arch_id == "A" else [input_dim, hidden_width(input_dim), 1]
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        layers.append((rng.uniform(-bound, bound, size=(fan_out, fan_in)), np.zeros(fan_out)))
    return Model(arch_id, input_dim, layers, float(dropout_rate), seed)


# ---------------------------------------------------------------- forward / backward

def _check_input(model, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionMismatch(f"expected input width {model.input_dim}, got shape {X.shape}")
    return X


def sample_masks(model: Model, n: int, rng) -> list[np.ndarray] | None:
    """Inverted-dropout masks (already scaled by 1/(1-p)) for a batch of ``n``."""
    if model.arch_id != "C" or model.dropout_rate == 0:
        return None
    keep = 1.0 - model.dropout_rate
    return [(rng.random((n, W.shape[1])) < keep) / keep for W, _ in model.layers]


def forward_batch(model: Model, X, mode: str = "infer", rng=None, masks=None):
    """Return ``(probabilities, cache)`` for a batch.

    In ``train`` mode architecture C draws fresh dropout masks from ``rng`` unless
    ``masks`` is given; ``infer`` mode never drops.
    """
    X = _check_input(model, X)
    if mode == "train" and masks is None and rng is not None:
        masks = sample_masks(model, X.shape[0], rng)
    if mode == "infer":
        masks = None

    inputs, pre = [], []
    a = X
    last = len(model.layers) - 1
    for i, (W, b) in enumerate(model.layers):
        if masks is not None:
            a = a * masks[i]
        inputs.append(a)
        z = a @ W.T + b
        pre.append(z)
        a = expit(z) if i == last else np.maximum(z, 0.0)
    return a[:, 0], {"inputs": inputs, "pre": pre, "masks": masks}


def forward(model: Model, x, mode: str = "infer", rng=None) -> float:
    p, _ = forward_batch(model, x, mode, rng)
    return float(p[0])


def bce_loss(p, y):
    p = np.clip(p, EPS, 1 - EPS)
    return -(y * np.log(p) + (1 - y) * np.log1p(-p))


def batch_loss(model: Model, X, y, masks=None) -> float:
    p, _ = forward_batch(model, X, "train" if masks is not None else "infer", masks=masks)
    return float(np.mean(bce_loss(p, np.asarray(y, dtype=float))))


def backward(model: Model, X, y, rng=None, masks=None):
    """Mean-over-batch BCE gradients as a list of ``(dW, db)`` per layer.

    Returns ``(grads, probabilities)``; the probabilities come from the same
    forward pass (and the same dropout masks) the gradients were taken through.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    mode = "train" if (rng is not None or masks is not None) else "infer"
    p, cache = forward_batch(model, X, mode, rng, masks)
    if y.shape[0] != p.shape[0]:
        raise DimensionMismatch(f"{p.shape[0]} inputs but {y.shape[0]} labels")
    n = p.shape[0]
    grads = [None] * len(model.layers)
    delta = ((p - y) / n)[:, None]  # dL/dz at the sigmoid output
    for i in range(len(model.layers) - 1, -1, -1):
        W, _ = model.layers[i]
        grads[i] = (delta.T @ cache["inputs"][i], delta.sum(axis=0))
        if i > 0:
            da = delta @ W
            if cache["masks"] is not None:
                da = da * cache["masks"][i]
            delta = da * (cache["pre"][i - 1] > 0)
    return grads, p


# ---------------------------------------------------------------- training

@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 16
    learning_rate: float = 0.05
    seed: int = 0
    dropout_rate: float | None = None  # arch C only; None -> DEFAULT_DROPOUT

    def __post_init__(self):
        if self.epochs < 0:
            raise BadConfig("epochs must be >= 0")
        if self.batch_size < 1:
            raise BadConfig("batch_size must be >= 1")
        if not self.learning_rate > 0:
            raise BadConfig("learning_rate must be > 0")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    train_acc: float


@dataclass
class TrainedModel:
    model: Model
    normalizer: Normalizer
    spec: FeatureSetSpec
    history: list[EpochStats] = field(default_factory=list)

    def __post_init__(self):
        if self.normalizer.dim != self.model.input_dim:
            raise SpecMismatch(
                f"normalizer has {self.normalizer.dim} dims, model expects {self.model.input_dim}")
        if self.spec.length != self.model.input_dim:
            raise SpecMismatch(
                f"spec {self.spec.set_id} K={self.spec.iterations} gives {self.spec.length} "
                f"features, model expects {self.model.input_dim}")

    @property
    def training_accuracy(self) -> float | None:
        return self.history[-1].train_acc if self.history else None

    def predict_proba(self, X_raw) -> np.ndarray:
        p, _ = forward_batch(self.model, self.normalizer.apply(X_raw), "infer")
        return p


def fit(model: Model, X, y, cfg: TrainConfig) -> tuple[Model, list[EpochStats]]:
    """Mini-batch gradient descent on already-scaled arrays. ``model`` is not mutated."""
    X = _check_input(model, X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise EmptyDataset("no training examples")
    if cfg.batch_size > n:
        raise BadConfig(f"batch_size {cfg.batch_size} exceeds dataset size {n}")
    model = copy.deepcopy(model)
    rng = np.random.default_rng(cfg.seed)
    history = []
    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            grads, p = backward(model, X[idx], y[idx], rng)
            total += float(np.sum(bce_loss(p, y[idx])))
            model.layers = [(W - cfg.learning_rate * dW, b - cfg.learning_rate * db)
                            for (W, b), (dW, db) in zip(model.layers, grads)]
        p_all, _ = forward_batch(model, X, "infer")
        acc = float(np.mean((p_all >= 0.5) == (y == 1)))
        history.append(EpochStats(epoch, total / n, acc))
    return model, history


def train(model: Model, train_ds, cfg: TrainConfig, normalize: bool = True) -> TrainedModel:
    """Fit ``model`` on a :class:`~satpredict.dataset.Dataset`.

    With ``normalize`` the z-score normalizer is fitted on ``train_ds`` and stored
    in the result; otherwise an identity normalizer is stored.
    """
    if len(train_ds) == 0:
        raise EmptyDataset("training dataset is empty")
    if train_ds.spec.length != model.input_dim:
        raise DimensionMismatch(
            f"dataset has {train_ds.spec.length} features, model expects {model.input_dim}")
    X = train_ds.X
    if normalize and not train_ds.normalized:
        norm = fit_normalizer(X)
    else:
        norm = Normalizer.identity(model.input_dim)
    trained, history = fit(model, norm.apply(X), train_ds.y, cfg)
    return TrainedModel(trained, norm, train_ds.spec, history)


def predict(tm: TrainedModel, trace, threshold: float = 0.5) -> tuple[int, float]:
    """Classify one run from its first K iterations. Ties at the threshold go to class 1."""
    x = extract_features(trace, tm.spec)
    p = float(tm.predict_proba(x)[0])
    return int(p >= threshold), p


# ---------------------------------------------------------------- persistence

def model_to_dict(tm: TrainedModel) -> dict:
    m = tm.model
    return {
        "schema_version": SCHEMA_VERSION,
        "arch_id": m.arch_id,
        "input_dim": m.input_dim,
        "dropout_rate": m.dropout_rate,
        "rng_seed": m.rng_seed,
        "layers": [{"W": W.tolist(), "b": b.tolist()} for W, b in m.layers],
        "normalizer": {"mean": list(tm.normalizer.mean), "std": list(tm.normalizer.std)},
        "spec": {"set_id": tm.spec.set_id, "K": tm.spec.iterations},
        "history": [{"epoch": h.epoch, "loss": h.loss, "train_acc": h.train_acc}
                    for h in tm.history],
    }


def model_from_dict(d: dict) -> TrainedModel:
    if not isinstance(d, dict):
        raise CorruptModel("model file is not a JSON object")
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"expected schema_version {SCHEMA_VERSION}, got {d.get('schema_version')!r}")
    try:
        layers = [(np.array(l["W"], dtype=float), np.array(l["b"], dtype=float))
                  for l in d["layers"]]
        model = Model(d["arch_id"], int(d["input_dim"]), layers, float(d["dropout_rate"]),
                      int(d.get("rng_seed", 0)))
        norm = Normalizer(tuple(float(v) for v in d["normalizer"]["mean"]),
                          tuple(float(v) for v in d["normalizer"]["std"]))
        spec = FeatureSetSpec(d["spec"]["set_id"], int(d["spec"]["K"]))
        history = [EpochStats(int(h["epoch"]), float(h["loss"]), float(h["train_acc"]))
                   for h in d["history"]]
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptModel(f"malformed model file: {e}") from None
    if model.arch_id not in ARCHS:
        raise CorruptModel(f"unknown architecture {model.arch_id!r}")
    if not 0 <= model.dropout_rate < 1 or (model.arch_id != "C" and model.dropout_rate):
        raise CorruptModel(f"bad dropout rate {model.dropout_rate!r} for arch {model.arch_id}")
    d_in = model.input_dim
    sizes = [d_in, 1] if model.arch_id == "A" else [d_in, hidden_width(d_in), 1]
    if len(layers) != len(sizes) - 1 or any(
            W.shape != (fan_out, fan_in) or b.shape != (fan_out,)
            for (W, b), fan_in, fan_out in zip(layers, sizes, sizes[1:])):
        raise CorruptModel("layer shapes do not match the architecture")
    try:
        return TrainedModel(model, norm, spec, history)
    except SpecMismatch as e:
        raise CorruptModel(str(e)) from None


def dumps_model(tm: TrainedModel) -> str:
    return json.dumps(model_to_dict(tm), indent=1) + "\n"


def loads_model(text: str) -> TrainedModel:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptModel(f"model file is not valid JSON: {e}") from None
    return model_from_dict(d)


def save_model(tm: TrainedModel, path) -> None:
    Path(path).write_text(dumps_model(tm))


def load_model(path) -> TrainedModel:
    return loads_model(Path(path).read_text())
