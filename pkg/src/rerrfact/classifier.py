"""Built-in trainable scorer over (claim, context) text pairs.

A logistic regression (softmax in 3-way mode) over hashed binary features:
claim unigrams/bigrams ("c:"), context unigrams/bigrams ("x:"), and shared
claim-context unigrams ("o:"), each crc32-hashed into a power-of-two bucket
space. Training is seeded-shuffle SGD, so identical inputs and seed give a
bit-identical model; persistence round-trips scores exactly.
"""

from __future__ import annotations

import json
import math
import random
import zlib
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import DataError, Label
from .tokenization import tokenize

FEATURE_SPEC_VERSION = 1
MODEL_FORMAT_VERSION = 1

MODE_BINARY = "binary"
MODE_MULTICLASS = "multiclass"

# Fixed class order for 3-way probability vectors and argmax tie-breaking.
CLASS_ORDER = (Label.NOINFO, Label.REFUTES, Label.SUPPORTS)


@dataclass(frozen=True)
class LabeledPair:
    """A (claim, context) training pair; label is bool or a 3-way Label."""

    claim_text: str
    context_text: str
    label: bool | Label

    def __post_init__(self) -> None:
        if not self.claim_text or not self.context_text:
            raise DataError("labeled pair texts must be non-empty")


@dataclass(frozen=True)
class ClassifierConfig:
    epochs: int = 10
    batch_size: int = 1
    learning_rate: float = 0.1
    l2: float = 0.0
    hash_dims: int = 2**20
    seed: int = 0
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise DataError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise DataError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise DataError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.l2 < 0:
            raise DataError(f"l2 must be non-negative, got {self.l2}")
        if self.hash_dims < 2 or self.hash_dims & (self.hash_dims - 1) != 0:
            raise DataError(f"hash_dims must be a power of two, got {self.hash_dims}")
        if not (0.0 < self.threshold < 1.0):
            raise DataError(f"threshold must be in (0, 1), got {self.threshold}")


def _bucket(feature: str, hash_dims: int) -> int:
    return zlib.crc32(feature.encode("utf-8")) % hash_dims


def featurize(claim_text: str, context_text: str, hash_dims: int) -> np.ndarray:
    """Active feature buckets (sorted, unique) for a pair; binary-valued."""
    claim_tokens = tokenize(claim_text)
    context_tokens = tokenize(context_text)
    features: set[str] = set()
    for token in claim_tokens:
        features.add("c:" + token)
    for left, right in zip(claim_tokens, claim_tokens[1:]):
        features.add(f"c:{left} {right}")
    for token in context_tokens:
        features.add("x:" + token)
    for left, right in zip(context_tokens, context_tokens[1:]):
        features.add(f"x:{left} {right}")
    for token in set(claim_tokens) & set(context_tokens):
        features.add("o:" + token)
    buckets = sorted({_bucket(f, hash_dims) for f in features})
    return np.asarray(buckets, dtype=np.int64)


def featurize_pair(pair: LabeledPair, hash_dims: int) -> np.ndarray:
    return featurize(pair.claim_text, pair.context_text, hash_dims)


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max()
    ez = np.exp(shifted)
    return ez / ez.sum()


@dataclass
class ClassifierModel:
    """Trained scorer; immutable by convention after training or loading."""

    mode: str
    hash_dims: int
    weights: np.ndarray  # (dims,) binary mode, (3, dims) multiclass
    bias: np.ndarray  # (1,) binary mode, (3,) multiclass
    config: ClassifierConfig
    feature_spec_version: int = FEATURE_SPEC_VERSION

    def _check_version(self) -> None:
        if self.feature_spec_version != FEATURE_SPEC_VERSION:
            raise DataError(
                f"model feature_spec_version {self.feature_spec_version} does not match "
                f"current featurizer version {FEATURE_SPEC_VERSION}"
            )

    def predict(self, claim_text: str, context_text: str) -> float:
        """Positive-class probability in [0, 1] (binary mode only)."""
        self._check_version()
        if self.mode != MODE_BINARY:
            raise DataError("predict() is for binary models; use predict_proba()")
        active = featurize(claim_text, context_text, self.hash_dims)
        z = float(self.weights[active].sum()) + float(self.bias[0])
        return _sigmoid(z)

    def predict_proba(self, claim_text: str, context_text: str) -> np.ndarray:
        """3-way probability vector ordered (NOINFO, REFUTES, SUPPORTS)."""
        self._check_version()
        if self.mode != MODE_MULTICLASS:
            raise DataError("predict_proba() is for multiclass models; use predict()")
        active = featurize(claim_text, context_text, self.hash_dims)
        z = self.weights[:, active].sum(axis=1) + self.bias
        return _softmax(z)


def decide(score: float, threshold: float) -> bool:
    """Boundary-inclusive thresholding: true iff score >= threshold."""
    if not (0.0 <= score <= 1.0) or not (0.0 <= threshold <= 1.0):
        raise DataError(f"score and threshold must be in [0, 1], got {score}, {threshold}")
    return score >= threshold


def _binary_targets(pairs: Sequence[LabeledPair]) -> np.ndarray:
    targets = []
    for pair in pairs:
        if not isinstance(pair.label, bool):
            raise DataError(f"binary training requires bool labels, got {pair.label!r}")
        targets.append(1.0 if pair.label else 0.0)
    return np.asarray(targets, dtype=np.float64)


def _multiclass_targets(pairs: Sequence[LabeledPair]) -> np.ndarray:
    targets = []
    for pair in pairs:
        if not isinstance(pair.label, Label):
            raise DataError(f"multiclass training requires Label labels, got {pair.label!r}")
        targets.append(CLASS_ORDER.index(pair.label))
    return np.asarray(targets, dtype=np.int64)


def train(pairs: Sequence[LabeledPair], config: ClassifierConfig) -> ClassifierModel:
    """Fit by seeded-shuffle SGD; deterministic given (pairs, config).

    The mode is inferred from the label type: bool -> binary logistic
    regression, Label -> 3-way softmax regression.
    """
    if not pairs:
        raise DataError("empty training set")
    if len({pair.label for pair in pairs}) < 2:
        raise DataError("single-class training set: decision boundary undefined")

    multiclass = isinstance(pairs[0].label, Label)
    features = [featurize_pair(pair, config.hash_dims) for pair in pairs]
    rng = random.Random(config.seed)
    order = list(range(len(pairs)))
    lr = config.learning_rate

    if multiclass:
        targets = _multiclass_targets(pairs)
        weights = np.zeros((len(CLASS_ORDER), config.hash_dims), dtype=np.float64)
        bias = np.zeros(len(CLASS_ORDER), dtype=np.float64)
        for _ in range(config.epochs):
            rng.shuffle(order)
            for start in range(0, len(order), config.batch_size):
                batch = order[start : start + config.batch_size]
                probs = []
                for i in batch:
                    z = weights[:, features[i]].sum(axis=1) + bias
                    probs.append(_softmax(z))
                if config.l2 > 0.0:
                    weights *= 1.0 - lr * config.l2
                scale = lr / len(batch)
                for i, p in zip(batch, probs):
                    grad = p.copy()
                    grad[targets[i]] -= 1.0
                    for cls, g in enumerate(grad):
                        weights[cls, features[i]] -= scale * g
                    bias -= scale * grad
        return ClassifierModel(MODE_MULTICLASS, config.hash_dims, weights, bias, config)

    targets = _binary_targets(pairs)
    weights = np.zeros(config.hash_dims, dtype=np.float64)
    bias = np.zeros(1, dtype=np.float64)
    for _ in range(config.epochs):
        rng.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            errors = []
            for i in batch:
                z = float(weights[features[i]].sum()) + float(bias[0])
                errors.append(_sigmoid(z) - targets[i])
            if config.l2 > 0.0:
                weights *= 1.0 - lr * config.l2
            scale = lr / len(batch)
            for i, err in zip(batch, errors):
                weights[features[i]] -= scale * err
                bias[0] -= scale * err
    return ClassifierModel(MODE_BINARY, config.hash_dims, weights, bias, config)


def binary_loss(
    weights: np.ndarray,
    bias: float,
    examples: Sequence[tuple[np.ndarray, float]],
    l2: float = 0.0,
) -> float:
    """Mean cross-entropy over (active-feature, target) examples plus L2 penalty."""
    total = 0.0
    for active, target in examples:
        z = float(weights[active].sum()) + bias
        # log(1 + exp(-z*sign)) written stably.
        margin = z if target >= 0.5 else -z
        total += math.log1p(math.exp(-abs(margin))) + max(-margin, 0.0)
    return total / len(examples) + 0.5 * l2 * float(weights @ weights)


def binary_gradient(
    weights: np.ndarray,
    bias: float,
    examples: Sequence[tuple[np.ndarray, float]],
    l2: float = 0.0,
) -> tuple[np.ndarray, float]:
    """Analytic gradient of binary_loss w.r.t. (weights, bias)."""
    grad_w = l2 * weights.copy()
    grad_b = 0.0
    for active, target in examples:
        z = float(weights[active].sum()) + bias
        err = (_sigmoid(z) - target) / len(examples)
        grad_w[active] += err
        grad_b += err
    return grad_w, grad_b


def save_model(model: ClassifierModel, path: str | Path) -> None:
    """Persist as canonical JSON; identical models serialize byte-identically."""
    if model.mode == MODE_BINARY:
        nonzero = np.nonzero(model.weights)[0]
        weights = {str(int(i)): float(model.weights[i]) for i in nonzero}
        bias = float(model.bias[0])
    else:
        weights = []
        for cls in range(len(CLASS_ORDER)):
            nonzero = np.nonzero(model.weights[cls])[0]
            weights.append({str(int(i)): float(model.weights[cls, i]) for i in nonzero})
        bias = [float(b) for b in model.bias]
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "feature_spec_version": model.feature_spec_version,
        "mode": model.mode,
        "hash_dims": model.hash_dims,
        "bias": bias,
        "weights": weights,
        "config": asdict(model.config),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load_model(path: str | Path) -> ClassifierModel:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format_version {payload.get('format_version')!r}")
    config = ClassifierConfig(**payload["config"])
    hash_dims = int(payload["hash_dims"])
    mode = payload["mode"]
    if mode == MODE_BINARY:
        weights = np.zeros(hash_dims, dtype=np.float64)
        for index, value in payload["weights"].items():
            weights[int(index)] = value
        bias = np.asarray([payload["bias"]], dtype=np.float64)
    elif mode == MODE_MULTICLASS:
        weights = np.zeros((len(CLASS_ORDER), hash_dims), dtype=np.float64)
        for cls, class_weights in enumerate(payload["weights"]):
            for index, value in class_weights.items():
                weights[cls, int(index)] = value
        bias = np.asarray(payload["bias"], dtype=np.float64)
    else:
        raise DataError(f"unknown model mode {mode!r}")
    return ClassifierModel(
        mode=mode,
        hash_dims=hash_dims,
        weights=weights,
        bias=bias,
        config=config,
        feature_spec_version=int(payload["feature_spec_version"]),
    )
