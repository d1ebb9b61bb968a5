"""Threshold sweeps, operating-point reports, and calibration.

A sweep produces one report per threshold with everything a Table-2 style
row needs: confusion counts, sensitivity/specificity, the per-ISUP false
negative breakdown, and the IHC reduction (TN + FN). Calibration picks the
largest grid threshold that still meets a target sensitivity on a
calibration cohort.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..errors import InvalidInputError
from .confusion import (
    ConfusionCounts,
    LabeledPrediction,
    confusion_at,
    ihc_reduction,
    metrics_from_counts,
)

DEFAULT_GRID = (0.50, 0.20, 0.10, 0.01)


@dataclass(frozen=True)
class OperatingPointReport:
    threshold: float
    sensitivity: float | None
    specificity: float | None
    counts: ConfusionCounts
    fn_isup_breakdown: dict[int, int]
    ihc_reduction_count: int
    ihc_reduction_fraction: float
    breakdown_location_level: bool = False

    def __post_init__(self):
        if self.ihc_reduction_count != self.counts.tn + self.counts.fn:
            raise InvalidInputError("ihc_reduction_count must equal tn + fn")


@dataclass(frozen=True)
class SelectedOperatingPoint:
    threshold: float
    target_met: bool
    achieved_sensitivity: float


def report_at(preds: list[LabeledPrediction], threshold: float) -> OperatingPointReport:
    counts = confusion_at(preds, threshold)
    metrics = metrics_from_counts(counts)
    reduction = ihc_reduction(counts, counts.total)
    breakdown = Counter()
    location_level = False
    for pred in preds:
        if pred.is_malignant and pred.cancer_probability < threshold:
            if pred.truth_isup is not None:
                breakdown[pred.truth_isup] += 1
                if pred.label_level == "location":
                    location_level = True
    return OperatingPointReport(
        threshold=threshold,
        sensitivity=metrics.sensitivity,
        specificity=metrics.specificity,
        counts=counts,
        fn_isup_breakdown=dict(sorted(breakdown.items())),
        ihc_reduction_count=reduction.count,
        ihc_reduction_fraction=reduction.fraction,
        breakdown_location_level=location_level
        or any(p.label_level == "location" for p in preds),
    )


def sweep(preds: list[LabeledPrediction], thresholds) -> list[OperatingPointReport]:
    """One OperatingPointReport per threshold, in the given order."""
    thresholds = list(thresholds)
    if not thresholds:
        raise InvalidInputError("threshold grid is empty")
    for t in thresholds:
        if not (0.0 < t <= 1.0):
            raise InvalidInputError(f"threshold {t!r} outside (0, 1]")
    return [report_at(preds, t) for t in thresholds]


def select_operating_point(
    calibration: list[LabeledPrediction],
    target_sensitivity: float,
    grid,
) -> SelectedOperatingPoint:
    """Largest grid threshold whose calibration sensitivity meets the target.

    If no grid value qualifies, the smallest one is returned with
    target_met=False so callers can surface the shortfall.
    """
    grid = sorted(set(grid))
    if not grid:
        raise InvalidInputError("threshold grid is empty")
    for t in grid:
        if not (0.0 < t <= 1.0):
            raise InvalidInputError(f"threshold {t!r} outside (0, 1]")
    if not (0.0 < target_sensitivity <= 1.0):
        raise InvalidInputError(f"target sensitivity {target_sensitivity!r} outside (0, 1]")
    if not any(p.is_malignant for p in calibration):
        raise InvalidInputError("calibration cohort has no malignant slide")

    def sensitivity_at(t: float) -> float:
        counts = confusion_at(calibration, t)
        return counts.tp / counts.n_malignant

    for t in reversed(grid):  # largest first
        s = sensitivity_at(t)
        if s >= target_sensitivity:
            return SelectedOperatingPoint(threshold=t, target_met=True, achieved_sensitivity=s)
    smallest = grid[0]
    return SelectedOperatingPoint(
        threshold=smallest, target_met=False, achieved_sensitivity=sensitivity_at(smallest)
    )


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    sensitivity: float | None
    specificity: float | None


def curve_points(preds: list[LabeledPrediction], threshold_step: float) -> list[CurvePoint]:
    """Sensitivity/specificity series on a regular threshold grid, for plotting."""
    if not (0.0 < threshold_step <= 0.5):
        raise InvalidInputError(f"step {threshold_step!r} outside (0, 0.5]")
    k_max = int(1.0 / threshold_step + 1e-9)
    out = []
    for k in range(1, k_max + 1):
        t = k * threshold_step
        counts = confusion_at(preds, t)
        metrics = metrics_from_counts(counts)
        out.append(
            CurvePoint(threshold=t, sensitivity=metrics.sensitivity, specificity=metrics.specificity)
        )
    return out
