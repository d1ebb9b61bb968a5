"""ROC curve construction and trapezoidal AUC.

Tied scores contribute half credit, which makes the trapezoidal estimate
identical to the Mann-Whitney rank statistic and invariant under any
strictly monotone transform of the scores.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UndefinedMetricError
from .confusion import LabeledPrediction


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]  # (FPR, TPR), sorted by FPR
    auc: float


def roc_and_auc(preds: list[LabeledPrediction]) -> RocCurve:
    """Sweep all distinct scores and integrate TPR over FPR.

    One curve point per distinct score (plus the (0,0) and (1,1) endpoints);
    a group of tied scores advances TP and FP together, producing a diagonal
    segment whose trapezoid equals the half-credit tie convention.
    """
    n_pos = sum(1 for p in preds if p.is_malignant)
    n_neg = len(preds) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs at least one slide of each class")

    by_score = sorted(preds, key=lambda p: -p.cancer_probability)
    points = [(0.0, 0.0)]
    area = 0.0
    tp = fp = 0
    i = 0
    while i < len(by_score):
        j = i
        d_tp = d_fp = 0
        while j < len(by_score) and (
            by_score[j].cancer_probability == by_score[i].cancer_probability
        ):
            if by_score[j].is_malignant:
                d_tp += 1
            else:
                d_fp += 1
            j += 1
        prev_tpr = tp / n_pos
        tp += d_tp
        fp += d_fp
        tpr = tp / n_pos
        fpr = fp / n_neg
        area += (d_fp / n_neg) * (prev_tpr + tpr) / 2.0
        points.append((fpr, tpr))
        i = j

    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    return RocCurve(points=tuple(points), auc=area)
