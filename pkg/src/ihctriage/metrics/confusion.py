"""Confusion counts and the Table-2 style point metrics derived from them.

The decision rule is inclusive: a slide is predicted positive (cancer, i.e.
"IHC recommended") iff its cancer probability is >= the threshold. This is
the sensitivity-favoring convention at the boundary and makes sensitivity
exactly non-increasing and specificity exactly non-decreasing in the
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import InvalidInputError

BENIGN = "benign"
MALIGNANT = "malignant"


@dataclass(frozen=True)
class LabeledPrediction:
    """A slide's ground truth joined with the model's cancer probability."""

    slide_id: str
    truth: str  # "benign" | "malignant"
    cancer_probability: float
    truth_isup: int | None = None
    cohort_id: str = ""
    label_level: str = "slide"  # "slide" | "location"

    def __post_init__(self):
        if self.truth not in (BENIGN, MALIGNANT):
            raise InvalidInputError(f"truth must be benign/malignant, got {self.truth!r}")
        p = self.cancer_probability
        if not (isinstance(p, (int, float)) and math.isfinite(p) and 0.0 <= p <= 1.0):
            raise InvalidInputError(f"cancer_probability out of [0,1]: {p!r}")
        if self.truth_isup is not None:
            if self.truth == BENIGN:
                raise InvalidInputError(f"benign slide {self.slide_id} carries an ISUP grade")
            if self.truth_isup not in (1, 2, 3, 4, 5):
                raise InvalidInputError(f"truth_isup must be 1..5, got {self.truth_isup!r}")
        if self.label_level not in ("slide", "location"):
            raise InvalidInputError(f"label_level must be slide/location, got {self.label_level!r}")

    @property
    def is_malignant(self) -> bool:
        return self.truth == MALIGNANT


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise InvalidInputError(f"{name} must be a non-negative int, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def n_malignant(self) -> int:
        return self.tp + self.fn

    @property
    def n_benign(self) -> int:
        return self.tn + self.fp

    @property
    def n_predicted_negative(self) -> int:
        return self.tn + self.fn


@dataclass(frozen=True)
class PointMetrics:
    """Sensitivity/specificity; None where the denominator class is empty."""

    sensitivity: float | None
    specificity: float | None


@dataclass(frozen=True)
class IhcReduction:
    """Slides for which IHC would not be ordered under AI advice (TN + FN)."""

    count: int
    fraction: float


def confusion_at(preds: list[LabeledPrediction], threshold: float) -> ConfusionCounts:
    """Classify each prediction at `threshold` and tally the confusion counts."""
    if not preds:
        raise InvalidInputError("prediction list is empty")
    tp = fp = tn = fn = 0
    for pred in preds:
        positive = pred.cancer_probability >= threshold
        if pred.is_malignant:
            if positive:
                tp += 1
            else:
                fn += 1
        else:
            if positive:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn, threshold=threshold)


def metrics_from_counts(counts: ConfusionCounts) -> PointMetrics:
    """Exact sensitivity = TP/(TP+FN) and specificity = TN/(TN+FP).

    A metric whose class is absent is reported as None; if both classes are
    empty the input is invalid. Values are carried at full precision;
    rounding happens only at rendering time.
    """
    if counts.n_malignant == 0 and counts.n_benign == 0:
        raise InvalidInputError("no slides in either class")
    sens = counts.tp / counts.n_malignant if counts.n_malignant else None
    spec = counts.tn / counts.n_benign if counts.n_benign else None
    return PointMetrics(sensitivity=sens, specificity=spec)


def ihc_reduction(counts: ConfusionCounts, n_total: int) -> IhcReduction:
    """IHC investigations saved if IHC were ordered only on positive predictions."""
    if n_total != counts.total:
        raise InvalidInputError(
            f"n_total={n_total} inconsistent with counts total {counts.total}"
        )
    saved = counts.n_predicted_negative
    return IhcReduction(count=saved, fraction=saved / n_total)
