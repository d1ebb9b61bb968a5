"""Attention-pooled inference over a bag of tile embeddings.

A bag of per-tile feature vectors is pooled with plain tanh attention
(score_k = w . tanh(V^T h_k), weights = softmax over tiles) and the pooled
vector is classified into primary/secondary Gleason patterns plus a scalar
cancer probability. Tiles are canonicalized to row-major anchor order at
bag construction, so results are bit-identical under any input tile order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, InvalidInputError, NumericError
from .gleason import BENIGN, gleason_to_isup, score_label

PATTERN_CLASSES = (BENIGN, 3, 4, 5)


@dataclass(frozen=True)
class EmbeddingBag:
    """Per-tile feature vectors for one slide, in canonical row-major order."""

    slide_id: str
    anchors: tuple[tuple[int, int], ...]
    features: np.ndarray  # (n_tiles, D) float64
    target_um_per_px: float = 1.0

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] == 0:
            raise InvalidInputError("embedding bag must be a non-empty (n, D) array")
        if len(self.anchors) != features.shape[0]:
            raise InvalidInputError("anchor count does not match feature rows")
        if len(set(self.anchors)) != len(self.anchors):
            raise InvalidInputError("anchors must be unique")
        if not np.all(np.isfinite(features)):
            raise NumericError(f"non-finite features in bag for {self.slide_id}")
        order = sorted(range(len(self.anchors)), key=lambda i: (self.anchors[i][1], self.anchors[i][0]))
        anchors = tuple((int(self.anchors[i][0]), int(self.anchors[i][1])) for i in order)
        features = features[order]
        features.setflags(write=False)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "features", features)

    @property
    def n_tiles(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class HeadParams:
    """Weights for one ensemble member's attention + classification head."""

    member_id: tuple[int, int]  # (fold 0..9, tta 0..2)
    attention_v: np.ndarray  # (D, L)
    attention_w: np.ndarray  # (L,)
    primary_weight: np.ndarray  # (4, D), classes (benign, 3, 4, 5)
    primary_bias: np.ndarray  # (4,)
    secondary_weight: np.ndarray  # (4, D)
    secondary_bias: np.ndarray  # (4,)
    cancer_weight: np.ndarray  # (D,)
    cancer_bias: float
    version: int = 1

    def __post_init__(self):
        arrays = {
            "attention_v": (np.asarray(self.attention_v, dtype=np.float64), 2),
            "attention_w": (np.asarray(self.attention_w, dtype=np.float64), 1),
            "primary_weight": (np.asarray(self.primary_weight, dtype=np.float64), 2),
            "primary_bias": (np.asarray(self.primary_bias, dtype=np.float64), 1),
            "secondary_weight": (np.asarray(self.secondary_weight, dtype=np.float64), 2),
            "secondary_bias": (np.asarray(self.secondary_bias, dtype=np.float64), 1),
            "cancer_weight": (np.asarray(self.cancer_weight, dtype=np.float64), 1),
        }
        for name, (arr, ndim) in arrays.items():
            if arr.ndim != ndim:
                raise ConfigurationError(f"{name} must have {ndim} dimensions")
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} contains non-finite values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        d, l = self.attention_v.shape
        if self.attention_w.shape != (l,):
            raise ConfigurationError("attention_w length must match attention_v columns")
        for name in ("primary_weight", "secondary_weight"):
            if getattr(self, name).shape != (len(PATTERN_CLASSES), d):
                raise ConfigurationError(f"{name} must be (4, D)")
        if self.primary_bias.shape != (4,) or self.secondary_bias.shape != (4,):
            raise ConfigurationError("pattern biases must have 4 entries")
        if self.cancer_weight.shape != (d,):
            raise ConfigurationError("cancer_weight length must match D")
        if not np.isfinite(self.cancer_bias):
            raise ConfigurationError("cancer_bias is non-finite")
        fold, tta = self.member_id
        if not (0 <= fold <= 9 and 0 <= tta <= 2):
            raise ConfigurationError(f"member_id out of range: {self.member_id}")

    @property
    def feature_dim(self) -> int:
        return self.attention_v.shape[0]

    @property
    def attention_dim(self) -> int:
        return self.attention_v.shape[1]


@dataclass(frozen=True)
class MemberPrediction:
    member_id: tuple[int, int]
    primary_pattern: object  # BENIGN | 3 | 4 | 5
    secondary_pattern: object
    gleason: str  # "benign" or "p+s"
    isup: object  # BENIGN | 1..5
    cancer_probability: float
    attention: np.ndarray  # per-tile, canonical order, sums to 1
    anchors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        attention = np.asarray(self.attention, dtype=np.float64)
        attention.setflags(write=False)
        object.__setattr__(self, "attention", attention)
        if self.primary_pattern == BENIGN and self.secondary_pattern != BENIGN:
            raise InvalidInputError("benign primary requires benign secondary")
        if not 0.0 <= self.cancer_probability <= 1.0:
            raise NumericError(f"cancer probability out of [0,1]: {self.cancer_probability}")


def attention_pool(bag: EmbeddingBag, params: HeadParams):
    """Pool a bag into one vector; returns (pooled (D,), attention (n,))."""
    if bag.feature_dim != params.feature_dim:
        raise ConfigurationError(
            f"bag D={bag.feature_dim} does not match head D={params.feature_dim}"
        )
    scores = np.tanh(bag.features @ params.attention_v) @ params.attention_w
    scores = scores - np.max(scores)  # stable softmax
    weights = np.exp(scores)
    weights /= weights.sum()
    pooled = weights @ bag.features
    return pooled, weights


def _argmax_prefer_higher(logits: np.ndarray) -> int:
    """Index of the maximum, ties broken toward the later (higher) class."""
    return int(len(logits) - 1 - np.argmax(logits[::-1]))


def classify(pooled: np.ndarray, params: HeadParams):
    """Pattern argmaxes plus logistic cancer probability for a pooled vector.

    Ties go to the higher pattern. If the primary head picks benign the
    member is benign outright; if only the secondary head picks benign the
    secondary pattern is coerced to the primary (single-pattern score).
    """
    pooled = np.asarray(pooled, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        primary_logits = params.primary_weight @ pooled + params.primary_bias
        secondary_logits = params.secondary_weight @ pooled + params.secondary_bias
        cancer_logit = float(params.cancer_weight @ pooled + params.cancer_bias)
    if not (
        np.all(np.isfinite(primary_logits))
        and np.all(np.isfinite(secondary_logits))
        and np.isfinite(cancer_logit)
    ):
        raise NumericError("non-finite logits")

    primary = PATTERN_CLASSES[_argmax_prefer_higher(primary_logits)]
    secondary = PATTERN_CLASSES[_argmax_prefer_higher(secondary_logits)]
    if primary == BENIGN:
        secondary = BENIGN
    elif secondary == BENIGN:
        secondary = primary
    probability = float(1.0 / (1.0 + np.exp(-cancer_logit)))
    return primary, secondary, probability


def predict_member(bag: EmbeddingBag, params: HeadParams) -> MemberPrediction:
    pooled, attention = attention_pool(bag, params)
    primary, secondary, probability = classify(pooled, params)
    return MemberPrediction(
        member_id=params.member_id,
        primary_pattern=primary,
        secondary_pattern=secondary,
        gleason=score_label(primary, secondary),
        isup=gleason_to_isup(primary, secondary),
        cancer_probability=probability,
        attention=attention,
        anchors=bag.anchors,
    )
