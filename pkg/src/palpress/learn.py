"""Classifier training, evaluation, and the scheme-by-model benchmark.

Four learners are implemented from first principles at desk scale:

* REG — ordinal least squares with ridge regularization; prediction is
  round-and-clamp of the scalar fit.
* SVM — three one-vs-rest linear SVMs trained by deterministic full-batch
  subgradient descent on the L2-regularized mean hinge loss.
* GBT — multiclass softmax gradient boosting with depth-limited regression
  trees over quantile-binned features and Newton leaf values.
* ANN — one-hidden-layer tanh perceptron with softmax cross-entropy,
  full-batch gradient descent, seeded initialization.

Every trainer is a deterministic function of (data, config, seed): training
twice produces bit-identical models. Ties in class scores always resolve to
the higher pressure level, mirroring the labeling rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import CupSize, DimensionError, PalpressError, PressureLevel, Quadrant, Rng
from .features import FeatureVector, Scheme, SchemeSet

__all__ = [
    "SingleClassError",
    "ModelKind",
    "SampleMeta",
    "LabeledSample",
    "Dataset",
    "Standardization",
    "standardize_fit",
    "RegConfig",
    "SvmConfig",
    "GbtConfig",
    "AnnConfig",
    "TrainedModel",
    "train_reg",
    "train_svm",
    "train_gbt",
    "train_ann",
    "train_model",
    "ann_loss_and_grads",
    "argmax_highest",
    "EvalReport",
    "evaluate",
    "report_from_predictions",
    "combine_datasets",
    "BenchRow",
    "BenchmarkTable",
    "benchmark",
    "BASELINE_ACCURACY",
]

N_CLASSES = 3

#: Expected accuracy of a uniform-random guesser over three classes. This
#: holds for any class balance: each sample is matched with probability 1/3.
BASELINE_ACCURACY = 1.0 / 3.0


class SingleClassError(PalpressError):
    """Training set contains a single class; train a constant predictor instead."""


class ModelKind(enum.Enum):
    REG = "REG"
    SVM = "SVM"
    GBT = "GBT"
    ANN = "ANN"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_label(cls, label: str) -> "ModelKind":
        try:
            return cls(str(label).upper())
        except ValueError:
            raise ValueError(f"unknown model kind {label!r}") from None


@dataclass(frozen=True)
class SampleMeta:
    cup: CupSize
    quadrant: Quadrant
    clip_id: str
    frame_index: int


@dataclass(frozen=True, eq=False)
class LabeledSample:
    features: FeatureVector
    label: PressureLevel
    meta: SampleMeta


@dataclass(frozen=True, eq=False)
class Dataset:
    """Train/test splits of labeled feature vectors for one scheme set."""

    train: tuple[LabeledSample, ...]
    test: tuple[LabeledSample, ...]
    scheme: SchemeSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "train", tuple(self.train))
        object.__setattr__(self, "test", tuple(self.test))
        dims = {len(s.features) for s in self.train} | {len(s.features) for s in self.test}
        if len(dims) > 1:
            raise DimensionError(f"mixed feature dimensions in dataset: {sorted(dims)}")
        for s in self.train + self.test:
            if s.features.scheme != self.scheme:
                raise ValueError(
                    f"sample scheme {s.features.scheme.label} != dataset {self.scheme.label}"
                )
        train_keys = {(s.meta.clip_id, s.meta.frame_index) for s in self.train}
        test_keys = {(s.meta.clip_id, s.meta.frame_index) for s in self.test}
        overlap = train_keys & test_keys
        if overlap:
            raise ValueError(f"train/test overlap on {sorted(overlap)[:3]}")

    @property
    def feature_dim(self) -> int:
        if self.train:
            return len(self.train[0].features)
        return len(self.test[0].features)

    def train_xy(self) -> tuple[np.ndarray, np.ndarray]:
        return _to_xy(self.train)

    def test_xy(self) -> tuple[np.ndarray, np.ndarray]:
        return _to_xy(self.test)

    @classmethod
    def from_arrays(
        cls,
        x_train: np.ndarray,
        y_train: np.ndarray,
        x_test: np.ndarray,
        y_test: np.ndarray,
        scheme: SchemeSet | None = None,
    ) -> "Dataset":
        """Wrap plain arrays (used by oracles and synthetic benchmarks)."""
        scheme = scheme or SchemeSet.of(Scheme.ENTROPY)

        def wrap(x, y, clip_id):
            return tuple(
                LabeledSample(
                    features=FeatureVector(values=row, scheme=scheme),
                    label=PressureLevel(int(lab)),
                    meta=SampleMeta(CupSize.A, Quadrant.LEFT_Q2, clip_id, i),
                )
                for i, (row, lab) in enumerate(zip(np.atleast_2d(x), y))
            )

        return cls(wrap(x_train, y_train, "train"), wrap(x_test, y_test, "test"), scheme)


def _to_xy(samples: Sequence[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    if not samples:
        return np.zeros((0, 0)), np.zeros(0, dtype=np.int64)
    x = np.stack([s.features.values for s in samples]).astype(np.float64)
    y = np.array([int(s.label) for s in samples], dtype=np.int64)
    return x, y


@dataclass(frozen=True, eq=False)
class Standardization:
    """Per-dimension z-score parameters learned from the train split only."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[1] != self.mean.size:
            raise DimensionError(
                f"feature dimension {x.shape[1]} != standardization {self.mean.size}"
            )
        return (x - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardization":
        return cls(np.asarray(d["mean"], dtype=np.float64), np.asarray(d["std"], dtype=np.float64))


def standardize_fit(x: np.ndarray) -> Standardization:
    """Population (ddof=0) z-score parameters; zero-variance dims pass through."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot standardize an empty training set")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return Standardization(mean=mean, std=std)


# --------------------------------------------------------------------------
# configs


@dataclass(frozen=True)
class RegConfig:
    ridge: float = 1e-3


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    epochs: int = 200


@dataclass(frozen=True)
class GbtConfig:
    depth: int = 3
    rounds: int = 100
    shrinkage: float = 0.1
    max_bins: int = 32

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")


@dataclass(frozen=True)
class AnnConfig:
    hidden: int = 32
    epochs: int = 500
    lr: float = 0.05
    seed: int = 0


def _default_config(kind: ModelKind, seed: int):
    if kind is ModelKind.REG:
        return RegConfig()
    if kind is ModelKind.SVM:
        return SvmConfig()
    if kind is ModelKind.GBT:
        return GbtConfig()
    return AnnConfig(seed=seed)


# --------------------------------------------------------------------------
# trained model


def argmax_highest(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax where exact ties resolve to the highest class index."""
    scores = np.atleast_2d(scores)
    rev = scores[:, ::-1]
    return scores.shape[1] - 1 - np.argmax(rev, axis=1)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    kind: ModelKind
    standardization: Standardization
    params: dict
    feature_dim: int

    def decision_scores(self, x: np.ndarray) -> np.ndarray:
        """Per-class scores on raw (unstandardized) feature rows."""
        xs = self.standardization.apply(np.atleast_2d(np.asarray(x, dtype=np.float64)))
        if self.kind is ModelKind.REG:
            pred = xs @ np.asarray(self.params["w"]) + self.params["b"]
            # Express the scalar ordinal fit as pseudo-scores: negative
            # distance to each class target, so argmax matches round+clamp.
            return -np.abs(pred[:, None] - np.arange(N_CLASSES)[None, :])
        if self.kind is ModelKind.SVM:
            w = np.asarray(self.params["w"])
            b = np.asarray(self.params["b"])
            return xs @ w.T + b
        if self.kind is ModelKind.GBT:
            return _gbt_scores(self.params, xs)
        return _ann_forward(self.params, xs)[-1]

    def predict(self, x: np.ndarray) -> np.ndarray:
        xs = self.standardization.apply(np.atleast_2d(np.asarray(x, dtype=np.float64)))
        if self.kind is ModelKind.REG:
            pred = xs @ np.asarray(self.params["w"]) + self.params["b"]
            return np.clip(np.floor(pred + 0.5), 0, N_CLASSES - 1).astype(np.int64)
        if self.kind is ModelKind.SVM:
            w = np.asarray(self.params["w"])
            b = np.asarray(self.params["b"])
            return argmax_highest(xs @ w.T + b)
        if self.kind is ModelKind.GBT:
            return argmax_highest(_gbt_scores(self.params, xs))
        return argmax_highest(_ann_forward(self.params, xs)[-1])

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.label,
            "feature_dim": self.feature_dim,
            "standardization": self.standardization.to_dict(),
            "params": _params_to_jsonable(self.kind, self.params),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        kind = ModelKind.from_label(d["kind"])
        return cls(
            kind=kind,
            standardization=Standardization.from_dict(d["standardization"]),
            params=_params_from_jsonable(kind, d["params"]),
            feature_dim=int(d["feature_dim"]),
        )


def _params_to_jsonable(kind: ModelKind, params: dict) -> dict:
    out = {}
    for key, value in params.items():
        out[key] = value.tolist() if isinstance(value, np.ndarray) else value
    return out


def _params_from_jsonable(kind: ModelKind, params: dict) -> dict:
    array_keys = {
        ModelKind.REG: {"w"},
        ModelKind.SVM: {"w", "b"},
        ModelKind.GBT: {"base"},
        ModelKind.ANN: {"w1", "b1", "w2", "b2"},
    }[kind]
    out = {}
    for key, value in params.items():
        out[key] = np.asarray(value, dtype=np.float64) if key in array_keys else value
    return out


def _prepare(data: Dataset) -> tuple[Standardization, np.ndarray, np.ndarray]:
    x, y = data.train_xy()
    if x.shape[0] == 0:
        raise ValueError("training split is empty")
    stz = standardize_fit(x)
    return stz, stz.apply(x), y


# --------------------------------------------------------------------------
# REG


def train_reg(data: Dataset, config: RegConfig | None = None) -> TrainedModel:
    """Ordinal least squares on targets {0, 1, 2} with a small ridge term."""
    config = config or RegConfig()
    stz, x, y = _prepare(data)
    n, d = x.shape
    xb = np.concatenate([x, np.ones((n, 1))], axis=1)
    reg = config.ridge * np.eye(d + 1)
    reg[-1, -1] = 0.0  # leave the bias unpenalized
    beta = np.linalg.solve(xb.T @ xb + reg, xb.T @ y.astype(np.float64))
    params = {"w": beta[:-1], "b": float(beta[-1])}
    return TrainedModel(ModelKind.REG, stz, params, d)


# --------------------------------------------------------------------------
# SVM


def train_svm(data: Dataset, config: SvmConfig | None = None) -> TrainedModel:
    """One-vs-rest linear SVMs via full-batch subgradient descent.

    Objective per machine: 0.5*||w||^2 + C * mean(hinge). The mean (rather
    than sum) makes the learned machine invariant to duplicating the
    training set, and full-batch updates keep training a pure function of
    the data with no sampling order to seed.
    """
    config = config or SvmConfig()
    stz, x, y = _prepare(data)
    if np.unique(y).size < 2:
        raise SingleClassError(
            "training split contains one class; use a constant predictor instead"
        )
    n, d = x.shape
    weights = np.zeros((N_CLASSES, d))
    biases = np.zeros(N_CLASSES)
    for k in range(N_CLASSES):
        sign = np.where(y == k, 1.0, -1.0)
        w = np.zeros(d)
        b = 0.0
        for t in range(config.epochs):
            margins = sign * (x @ w + b)
            active = margins < 1.0
            grad_w = w - (config.c / n) * (sign[active] @ x[active])
            grad_b = -(config.c / n) * sign[active].sum()
            eta = 1.0 / (t + 1.0)
            w = w - eta * grad_w
            b = b - eta * grad_b
        weights[k] = w
        biases[k] = b
    return TrainedModel(ModelKind.SVM, stz, {"w": weights, "b": biases}, d)


# --------------------------------------------------------------------------
# GBT


def _quantile_bins(
    x: np.ndarray, max_bins: int
) -> tuple[np.ndarray, list[np.ndarray], np.ndarray, int]:
    """Per-feature candidate thresholds and the bin code of every sample.

    Sample i goes left at candidate j of feature f iff codes[i, f] <= j.
    """
    n, d = x.shape
    qs = np.linspace(0.0, 1.0, max_bins + 1)[1:-1]
    edges: list[np.ndarray] = []
    for f in range(d):
        col = x[:, f]
        e = np.unique(np.quantile(col, qs))
        e = e[e < col.max()] if e.size else e
        edges.append(e)
    width = max((e.size for e in edges), default=0) + 1
    codes = np.empty((n, d), dtype=np.int64)
    for f in range(d):
        codes[:, f] = np.searchsorted(edges[f], x[:, f], side="left")
    n_candidates = np.array([e.size for e in edges], dtype=np.int64)
    return codes, edges, n_candidates, width


def _fit_tree(
    residual: np.ndarray,
    codes: np.ndarray,
    edges: list[np.ndarray],
    cand_mask: np.ndarray,
    width: int,
    depth_limit: int,
    train_pred: np.ndarray,
) -> dict:
    n, d = codes.shape
    offsets = np.arange(d, dtype=np.int64) * width

    def leaf(rows: np.ndarray) -> dict:
        r = residual[rows]
        num = r.sum()
        den = (np.abs(r) * (1.0 - np.abs(r))).sum()
        value = ((N_CLASSES - 1) / N_CLASSES) * num / max(den, 1e-10)
        train_pred[rows] = value
        return {"value": float(value)}

    def build(rows: np.ndarray, depth: int) -> dict:
        if depth >= depth_limit or rows.size < 4:
            return leaf(rows)
        r = residual[rows]
        flat = (codes[rows] + offsets).ravel()
        counts = np.bincount(flat, minlength=d * width).reshape(d, width).astype(np.float64)
        sums = np.bincount(flat, weights=np.repeat(r, d), minlength=d * width).reshape(d, width)
        n_left = np.cumsum(counts, axis=1)
        s_left = np.cumsum(sums, axis=1)
        n_total = n_left[:, -1:]
        s_total = s_left[:, -1:]
        n_right = n_total - n_left
        s_right = s_total - s_left
        valid = cand_mask & (n_left > 0) & (n_right > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = (
                s_left**2 / np.maximum(n_left, 1.0)
                + s_right**2 / np.maximum(n_right, 1.0)
                - s_total**2 / n_total
            )
        gain = np.where(valid, gain, -np.inf)
        best = int(np.argmax(gain))
        f, j = divmod(best, width)
        if not np.isfinite(gain.flat[best]) or gain.flat[best] <= 1e-12:
            return leaf(rows)
        go_left = codes[rows, f] <= j
        return {
            "feature": int(f),
            "threshold": float(edges[f][j]),
            "left": build(rows[go_left], depth + 1),
            "right": build(rows[~go_left], depth + 1),
        }

    return build(np.arange(n), 0)


def _tree_predict(tree: dict, x: np.ndarray, out: np.ndarray, rows: np.ndarray) -> None:
    if "value" in tree:
        out[rows] = tree["value"]
        return
    go_left = x[rows, tree["feature"]] <= tree["threshold"]
    _tree_predict(tree["left"], x, out, rows[go_left])
    _tree_predict(tree["right"], x, out, rows[~go_left])


def _softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _log_loss(scores: np.ndarray, y: np.ndarray) -> float:
    p = _softmax(scores)
    picked = np.clip(p[np.arange(y.size), y], 1e-15, None)
    return float(-np.log(picked).mean())


def _gbt_scores(params: dict, xs: np.ndarray) -> np.ndarray:
    n = xs.shape[0]
    scores = np.tile(np.asarray(params["base"], dtype=np.float64), (n, 1))
    rows = np.arange(n)
    buf = np.empty(n)
    for round_trees in params["trees"]:
        for k, tree in enumerate(round_trees):
            _tree_predict(tree, xs, buf, rows)
            scores[:, k] += params["shrinkage"] * buf
    return scores


def train_gbt(data: Dataset, config: GbtConfig | None = None) -> TrainedModel:
    """Multiclass softmax gradient boosting with Newton leaf values."""
    config = config or GbtConfig()
    stz, x, y = _prepare(data)
    n, d = x.shape
    onehot = np.zeros((n, N_CLASSES))
    onehot[np.arange(n), y] = 1.0
    priors = np.clip(onehot.mean(axis=0), 1e-12, None)
    base = np.log(priors)

    codes, edges, n_candidates, width = _quantile_bins(x, config.max_bins)
    cand_mask = np.arange(width)[None, :] < n_candidates[:, None]

    scores = np.tile(base, (n, 1))
    trees: list[list[dict]] = []
    loss_curve = [_log_loss(scores, y)]
    train_pred = np.empty(n)
    for _ in range(config.rounds):
        p = _softmax(scores)
        round_trees = []
        for k in range(N_CLASSES):
            residual = onehot[:, k] - p[:, k]
            tree = _fit_tree(
                residual, codes, edges, cand_mask, width, config.depth, train_pred
            )
            scores[:, k] += config.shrinkage * train_pred
            round_trees.append(tree)
        trees.append(round_trees)
        loss_curve.append(_log_loss(scores, y))

    params = {
        "base": base,
        "shrinkage": config.shrinkage,
        "trees": trees,
        "loss_curve": [float(v) for v in loss_curve],
    }
    return TrainedModel(ModelKind.GBT, stz, params, d)


# --------------------------------------------------------------------------
# ANN


def _ann_forward(params: dict, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hidden = np.tanh(xs @ np.asarray(params["w1"]) + np.asarray(params["b1"]))
    logits = hidden @ np.asarray(params["w2"]) + np.asarray(params["b2"])
    return hidden, logits


def ann_loss_and_grads(
    params: dict, xs: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Softmax cross-entropy loss and its analytic gradients.

    Exposed at module level so the finite-difference check can probe the
    same code path the trainer uses.
    """
    n = xs.shape[0]
    hidden, logits = _ann_forward(params, xs)
    p = _softmax(logits)
    picked = np.clip(p[np.arange(n), y], 1e-15, None)
    loss = float(-np.log(picked).mean())

    onehot = np.zeros_like(p)
    onehot[np.arange(n), y] = 1.0
    d_logits = (p - onehot) / n
    grad_w2 = hidden.T @ d_logits
    grad_b2 = d_logits.sum(axis=0)
    d_hidden = d_logits @ np.asarray(params["w2"]).T
    d_act = d_hidden * (1.0 - hidden**2)
    grad_w1 = xs.T @ d_act
    grad_b1 = d_act.sum(axis=0)
    return loss, {"w1": grad_w1, "b1": grad_b1, "w2": grad_w2, "b2": grad_b2}


def ann_init(dim: int, hidden: int, seed: int) -> dict[str, np.ndarray]:
    gen = Rng(seed).generator
    return {
        "w1": gen.normal(0.0, 1.0 / np.sqrt(dim), size=(dim, hidden)),
        "b1": np.zeros(hidden),
        "w2": gen.normal(0.0, 1.0 / np.sqrt(hidden), size=(hidden, N_CLASSES)),
        "b2": np.zeros(N_CLASSES),
    }


def train_ann(data: Dataset, config: AnnConfig | None = None) -> TrainedModel:
    """One-hidden-layer tanh network, full-batch gradient descent."""
    config = config or AnnConfig()
    stz, x, y = _prepare(data)
    params = ann_init(x.shape[1], config.hidden, config.seed)
    loss_curve = []
    for _ in range(config.epochs):
        loss, grads = ann_loss_and_grads(params, x, y)
        loss_curve.append(loss)
        for key in params:
            params[key] = params[key] - config.lr * grads[key]
    params["loss_curve"] = [float(v) for v in loss_curve]
    return TrainedModel(ModelKind.ANN, stz, params, x.shape[1])


_TRAINERS = {
    ModelKind.REG: train_reg,
    ModelKind.SVM: train_svm,
    ModelKind.GBT: train_gbt,
    ModelKind.ANN: train_ann,
}


def train_model(kind: ModelKind, data: Dataset, config=None, seed: int = 0) -> TrainedModel:
    """Dispatch to the kind-specific trainer with its default config."""
    if config is None:
        config = _default_config(kind, seed)
    return _TRAINERS[kind](data, config)


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Accuracy plus a 3x3 confusion matrix (rows: truth, cols: prediction)."""

    accuracy: float
    confusion: np.ndarray
    n: int

    def __post_init__(self) -> None:
        conf = np.array(self.confusion, dtype=np.int64, copy=True)
        if conf.shape != (N_CLASSES, N_CLASSES):
            raise DimensionError(f"confusion must be 3x3, got {conf.shape}")
        if int(conf.sum()) != self.n:
            raise ValueError("confusion counts do not sum to n")
        conf.flags.writeable = False
        object.__setattr__(self, "confusion", conf)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "confusion": self.confusion.tolist(),
            "n": self.n,
        }


def report_from_predictions(y_true: np.ndarray, y_pred: np.ndarray) -> EvalReport:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise DimensionError("prediction/label length mismatch")
    conf = np.bincount(y_true * N_CLASSES + y_pred, minlength=N_CLASSES * N_CLASSES)
    conf = conf.reshape(N_CLASSES, N_CLASSES)
    n = int(y_true.size)
    accuracy = float(np.trace(conf) / n) if n else 0.0
    return EvalReport(accuracy=accuracy, confusion=conf, n=n)


def evaluate(model: TrainedModel, samples: Sequence[LabeledSample]) -> EvalReport:
    x, y = _to_xy(samples)
    if x.shape[0] and x.shape[1] != model.feature_dim:
        raise DimensionError(
            f"feature dimension {x.shape[1]} does not match model {model.feature_dim}"
        )
    return report_from_predictions(y, model.predict(x))


# --------------------------------------------------------------------------
# benchmark harness


def combine_datasets(singles: Mapping[Scheme, Dataset], scheme_set: SchemeSet) -> Dataset:
    """Concatenate single-scheme datasets sample-wise into a combined one.

    All constituents must describe the same frames in the same order; the
    combined vector follows the canonical scheme order.
    """
    parts = [singles[s] for s in scheme_set]
    first = parts[0]
    for other in parts[1:]:
        for split in ("train", "test"):
            a, b = getattr(first, split), getattr(other, split)
            if len(a) != len(b) or any(x.meta != y.meta or x.label != y.label for x, y in zip(a, b)):
                raise ValueError("single-scheme datasets are not frame-aligned")

    def merge(split: str) -> tuple[LabeledSample, ...]:
        merged = []
        for rows in zip(*(getattr(p, split) for p in parts)):
            values = np.concatenate([r.features.values for r in rows])
            merged.append(
                LabeledSample(
                    features=FeatureVector(values=values, scheme=scheme_set),
                    label=rows[0].label,
                    meta=rows[0].meta,
                )
            )
        return tuple(merged)

    return Dataset(train=merge("train"), test=merge("test"), scheme=scheme_set)


@dataclass(frozen=True)
class BenchRow:
    scheme: str
    model: str
    train_acc: float
    test_acc: float

    @property
    def gap(self) -> float:
        return self.train_acc - self.test_acc


@dataclass(frozen=True)
class BenchmarkTable:
    """Benchmark results plus the analytic chance-baseline row."""

    rows: tuple[BenchRow, ...]
    seed: int
    baseline: float = BASELINE_ACCURACY

    def to_csv(self) -> str:
        lines = ["scheme,model,train_acc,test_acc,gap"]
        for r in self.rows:
            lines.append(
                f"{r.scheme},{r.model},{r.train_acc:.6f},{r.test_acc:.6f},{r.gap:.6f}"
            )
        lines.append(
            f"baseline,chance,{self.baseline:.6f},{self.baseline:.6f},{0.0:.6f}"
        )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "format_version": "1",
            "seed": self.seed,
            "baseline": {
                "scheme": "baseline",
                "model": "chance",
                "train_acc": self.baseline,
                "test_acc": self.baseline,
            },
            "rows": [
                {
                    "scheme": r.scheme,
                    "model": r.model,
                    "train_acc": r.train_acc,
                    "test_acc": r.test_acc,
                    "gap": r.gap,
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "BenchmarkTable":
        if str(d.get("format_version")) != "1":
            raise ValueError(f"unknown report format_version {d.get('format_version')!r}")
        rows = tuple(
            BenchRow(
                scheme=str(r["scheme"]),
                model=str(r["model"]),
                train_acc=float(r["train_acc"]),
                test_acc=float(r["test_acc"]),
            )
            for r in d["rows"]
        )
        baseline = float(d["baseline"]["test_acc"])
        return cls(rows=rows, seed=int(d.get("seed", 0)), baseline=baseline)

    def format_table(self) -> str:
        header = f"{'scheme':<10} {'model':<6} {'train_acc':>9} {'test_acc':>9} {'gap':>7}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.scheme:<10} {r.model:<6} {r.train_acc:>9.4f} {r.test_acc:>9.4f} {r.gap:>7.4f}"
            )
        lines.append(
            f"{'baseline':<10} {'chance':<6} {self.baseline:>9.4f} {self.baseline:>9.4f} {0.0:>7.4f}"
        )
        return "\n".join(lines)


def benchmark(
    singles: Mapping[Scheme, Dataset],
    kinds: Sequence[ModelKind] | None = None,
    scheme_sets: Sequence[SchemeSet] | None = None,
    seed: int = 0,
) -> BenchmarkTable:
    """Train/test accuracy for every (scheme set, model kind) cell.

    ``singles`` maps each base scheme to its dataset over the same frames;
    combined scheme sets are materialized by concatenation. The chance
    baseline is reported analytically (uniform guessing is correct with
    probability 1/3 whatever the class balance), so it carries no sampling
    noise.
    """
    kinds = tuple(kinds) if kinds else tuple(ModelKind)
    scheme_sets = tuple(scheme_sets) if scheme_sets else SchemeSet.all_sets()
    needed = {s for ss in scheme_sets for s in ss}
    missing = [s.label for s in needed if s not in singles]
    if missing:
        raise ValueError(f"benchmark missing single-scheme datasets: {missing}")

    seed_gen = Rng(seed).generator
    rows = []
    for scheme_set in scheme_sets:
        if len(scheme_set) == 1:
            data = singles[scheme_set.schemes[0]]
            if data.scheme != scheme_set:
                raise ValueError(
                    f"dataset for {scheme_set.label} carries scheme {data.scheme.label}"
                )
        else:
            data = combine_datasets(singles, scheme_set)
        for kind in kinds:
            cell_seed = int(seed_gen.integers(0, 2**63))
            model = train_model(kind, data, seed=cell_seed)
            train_acc = evaluate(model, data.train).accuracy
            test_acc = evaluate(model, data.test).accuracy
            rows.append(
                BenchRow(
                    scheme=scheme_set.label,
                    model=kind.label,
                    train_acc=train_acc,
                    test_acc=test_acc,
                )
            )
    return BenchmarkTable(rows=tuple(rows), seed=seed)
