"""A small fully connected classifier written directly in numpy.

Architecture 9 x 512 x 128 x 64 x 7: ReLU hidden layers, softmax output,
inverted dropout after the first hidden layer, mean sparse categorical
cross-entropy, trained with Adam on shuffled mini-batches.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

LAYER_SIZES = (9, 512, 128, 64, 7)
MODEL_FORMAT_VERSION = 1
PROB_FLOOR = 1e-15


@dataclass
class MLPParams:
    weights: list[np.ndarray]  # layer l: (out, in)
    biases: list[np.ndarray]

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def copy(self) -> "MLPParams":
        return MLPParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def arrays(self) -> list[np.ndarray]:
        """Weights and biases interleaved: W1, b1, W2, b2, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def scaled(self, factor: float) -> "MLPParams":
        return MLPParams([w * factor for w in self.weights], [b * factor for b in self.biases])


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: MLPParams, **hyper) -> "AdamState":
        arrays = params.arrays()
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays], **hyper)


@dataclass
class TrainConfig:
    epochs: int = 500
    batch_size: int = 32
    seed: int = 0
    dropout: float = 0.2
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    repetitions: int = 10

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


def init_params(seed: int = 0, sizes: Sequence[int] = LAYER_SIZES) -> MLPParams:
    """He-normal weights (variance 2 / fan_in), zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MLPParams(weights, biases)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def dropout_mask(rng: np.random.Generator, shape, rate: float) -> np.ndarray:
    """Inverted-dropout multiplier: 0 with probability ``rate``, else 1/(1-rate)."""
    if rate == 0:
        return np.ones(shape)
    keep = rng.random(shape) >= rate
    return keep / (1.0 - rate)


def _forward(params: MLPParams, X: np.ndarray, mask: np.ndarray | None):
    """Probabilities plus the per-layer cache needed by backprop."""
    acts = [X]
    pre = []
    a = X
    last = len(params.weights) - 1
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        pre.append(z)
        if l == last:
            break
        a = np.maximum(z, 0.0)
        if l == 0 and mask is not None:
            a = a * mask
        acts.append(a)
    return softmax(pre[-1]), (acts, pre)


def forward(
    params: MLPParams,
    x: np.ndarray,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
    dropout: float = 0.2,
) -> np.ndarray:
    """Class probabilities for one input (shape (9,)) or a batch (B, 9).

    ``mode="train"`` applies inverted dropout to the first hidden layer.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite input")
    mask = None
    if mode == "train":
        if rng is None:
            raise ValueError("train mode needs an rng")
        mask = dropout_mask(rng, (len(X), params.weights[0].shape[0]), dropout)
    elif mode != "eval":
        raise ValueError(f"unknown mode {mode!r}")
    probs, _ = _forward(params, X, mask)
    return probs[0] if single else probs


def loss(probs: np.ndarray, label) -> float:
    """Cross-entropy ``-log p[label]``; averaged when given a batch."""
    P = np.atleast_2d(np.asarray(probs, dtype=float))
    y = np.atleast_1d(np.asarray(label))
    k = P.shape[1]
    if y.shape[0] != P.shape[0]:
        raise ValueError("one label per row expected")
    if np.any((y < 0) | (y >= k)) or not np.issubdtype(y.dtype, np.integer):
        raise ValueError(f"labels must be integers in [0, {k})")
    picked = P[np.arange(len(y)), y]
    return float(np.mean(-np.log(np.maximum(picked, PROB_FLOOR))))


def backward(params: MLPParams, X: np.ndarray, y: np.ndarray, mask: np.ndarray | None = None):
    """Gradients of the mean batch loss as ``(dW list, db list, loss)``.

    ``mask`` is the first-hidden-layer dropout multiplier of the matching
    forward pass (``None`` for no dropout).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y))
    probs, (acts, pre) = _forward(params, X, mask)
    n = len(X)
    value = loss(probs, y)
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    dW = [None] * len(params.weights)
    db = [None] * len(params.weights)
    for l in range(len(params.weights) - 1, -1, -1):
        dW[l] = delta.T @ acts[l]
        db[l] = delta.sum(axis=0)
        if l == 0:
            break
        da = delta @ params.weights[l]
        if l == 1 and mask is not None:
            da = da * mask
        delta = da * (pre[l - 1] > 0)
    return dW, db, value


def adam_step(params: MLPParams, grads, state: AdamState) -> tuple[MLPParams, AdamState]:
    """One bias-corrected Adam update; returns fresh params and state."""
    dW, db = grads[0], grads[1]
    flat_g = []
    for w, b in zip(dW, db):
        flat_g += [w, b]
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    new_m, new_v, new_p = [], [], []
    for p, g, m, v in zip(params.arrays(), flat_g, state.m, state.v):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        new_p.append(p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
        new_m.append(m)
        new_v.append(v)
    params = MLPParams(new_p[0::2], new_p[1::2])
    return params, AdamState(new_m, new_v, t, state.lr, b1, b2, state.eps)


def predict_proba(params: MLPParams, X: np.ndarray) -> np.ndarray:
    return forward(params, np.atleast_2d(X), mode="eval")


def predict(params: MLPParams, X: np.ndarray) -> np.ndarray:
    return np.argmax(predict_proba(params, X), axis=1)


def accuracy(params: MLPParams, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(predict(params, X) == np.asarray(y)))


def confusion_matrix(y_true, y_pred, n_classes: int = 7) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(y_true), np.asarray(y_pred)), 1)
    return cm


@dataclass
class TrainResult:
    params: MLPParams
    history: dict = field(default_factory=dict)
    config: TrainConfig | None = None


def train(
    X: np.ndarray,
    y: np.ndarray,
    cfg: TrainConfig = TrainConfig(),
    X_test: np.ndarray | None = None,
    y_test: np.ndarray | None = None,
    sizes: Sequence[int] = LAYER_SIZES,
) -> TrainResult:
    """Mini-batch Adam training; accuracies are recorded after every epoch.

    The recorded accuracies are eval-mode (no dropout) over the full
    training and, if given, test sets.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    n_classes = sizes[-1]
    counts = np.bincount(y, minlength=n_classes)
    if len(counts) > n_classes or np.any(counts[:n_classes] == 0):
        missing = [c for c in range(n_classes) if c >= len(counts) or counts[c] == 0]
        raise ValueError(f"no training examples for classes {missing}")
    if X.shape != (len(y), sizes[0]):
        raise ValueError(f"expected X of shape ({len(y)}, {sizes[0]}), got {X.shape}")

    params = init_params(cfg.seed, sizes)
    state = AdamState.zeros_like(params, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    rng = np.random.default_rng([cfg.seed, 1])
    hist = {"loss": [], "train_accuracy": [], "test_accuracy": []}
    n = len(X)
    for _ in range(cfg.epochs):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            mask = dropout_mask(rng, (len(idx), sizes[1]), cfg.dropout)
            dW, db, value = backward(params, X[idx], y[idx], mask)
            params, state = adam_step(params, (dW, db), state)
            total += value * len(idx)
        hist["loss"].append(total / n)
        hist["train_accuracy"].append(accuracy(params, X, y))
        if X_test is not None and len(X_test):
            hist["test_accuracy"].append(accuracy(params, X_test, y_test))
    return TrainResult(params, hist, cfg)


def gradient_check(
    params: MLPParams,
    x: np.ndarray,
    label,
    n_params: int = 200,
    step: float = 1e-5,
    seed: int = 0,
    kink: float = 1e-6,
) -> float:
    """Largest relative gap between backprop and central differences.

    Samples ``n_params`` parameter entries at random.  An entry whose
    perturbation by ``step`` would move some ReLU pre-activation across
    zero, or leave it within ``kink`` of zero, is redrawn.
    """
    X = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(label))
    dW, db, _ = backward(params, X, y, None)
    analytic = []
    for w, b in zip(dW, db):
        analytic += [w, b]
    arrays = params.arrays()
    sizes = [a.size for a in arrays]
    total = sum(sizes)
    rng = np.random.default_rng(seed)

    # the difference quotient is evaluated in extended precision so that
    # roundoff stays far below the tolerance even for tiny gradients
    wide = np.longdouble
    Xw = X.astype(wide)

    def f(p: MLPParams):
        probs, (_, pre) = _forward(p, Xw, None)
        picked = probs[np.arange(len(y)), y]
        return np.mean(-np.log(np.maximum(picked, PROB_FLOOR))), pre[:-1]

    base = MLPParams([w.astype(wide) for w in params.weights], [b.astype(wide) for b in params.biases])
    _, base_pre = f(base)
    worst = 0.0
    checked = 0
    attempts = 0
    while checked < min(n_params, total) and attempts < 50 * n_params:
        attempts += 1
        flat = int(rng.integers(total))
        k = int(np.searchsorted(np.cumsum(sizes), flat, side="right"))
        local = flat - (sum(sizes[:k]))
        results = []
        for sgn in (1.0, -1.0):
            p = base.copy()
            target = p.arrays()[k]
            target.flat[local] += wide(sgn * step)
            results.append(f(p))
        (lp, pre_p), (lm, pre_m) = results
        near_kink = any(
            np.any(np.sign(a) != np.sign(z))
            or np.any(np.sign(c) != np.sign(z))
            or np.any((np.abs(z) < kink) & ((a != z) | (c != z)))
            for a, c, z in zip(pre_p, pre_m, base_pre)
        )
        if near_kink:
            continue
        numeric = float((lp - lm) / (2 * wide(step)))
        exact = float(analytic[k].flat[local])
        denom = max(abs(numeric), abs(exact), 1e-8)
        worst = max(worst, abs(numeric - exact) / denom)
        checked += 1
    return worst


# -- model file -------------------------------------------------------------


def save_model(path, params: MLPParams, meta: dict | None = None, **extra_arrays) -> None:
    """Write an ``.npz`` container: sizes, all weights/biases, JSON metadata."""
    payload = {
        "format_version": np.array(MODEL_FORMAT_VERSION),
        "sizes": np.array(params.sizes, dtype=np.int64),
        "meta": np.array(json.dumps(meta or {}, sort_keys=True)),
    }
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        payload[f"W{l}"] = w
        payload[f"b{l}"] = b
    for k, v in extra_arrays.items():
        payload[f"x_{k}"] = np.asarray(v)
    with open(path, "wb") as fh:
        np.savez(fh, **payload)


def load_model(path) -> tuple[MLPParams, dict, dict]:
    """Inverse of :func:`save_model`: ``(params, meta, extra_arrays)``."""
    with np.load(Path(path), allow_pickle=False) as z:
        version = int(z["format_version"])
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        sizes = [int(s) for s in z["sizes"]]
        n_layers = len(sizes) - 1
        params = MLPParams(
            [z[f"W{l}"].copy() for l in range(n_layers)],
            [z[f"b{l}"].copy() for l in range(n_layers)],
        )
        meta = json.loads(str(z["meta"]))
        extra = {k[2:]: z[k].copy() for k in z.files if k.startswith("x_")}
    if list(params.sizes) != sizes:
        raise ValueError("layer shapes do not match the stored sizes")
    return params, meta, extra


def config_dict(cfg: TrainConfig) -> dict:
    return asdict(cfg)
