"""Rendering of sweep results: delimited tables, JSON, and figure files.

Metrics are computed at full precision; this module owns the rounding used
for display (3 decimals for rates, 1 decimal for percentages, half-up).
Ratios are rendered from their integer counts with decimal arithmetic so
formatting never inherits binary floating-point dust.
"""

from __future__ import annotations

import csv
import io
import json
from decimal import ROUND_HALF_UP, Decimal

from .confusion import ConfusionCounts
from .roc import RocCurve
from .sweep import CurvePoint, OperatingPointReport

ISUP_GRADES = (1, 2, 3, 4, 5)


def ratio_str(numerator: int, denominator: int, places: int = 3) -> str:
    """Exact decimal rendering of numerator/denominator, half-up."""
    if denominator == 0:
        return ""
    q = Decimal(1).scaleb(-places)
    return str((Decimal(numerator) / Decimal(denominator)).quantize(q, ROUND_HALF_UP))


def percent_str(numerator: int, denominator: int, places: int = 1) -> str:
    if denominator == 0:
        return ""
    q = Decimal(1).scaleb(-places)
    return str((Decimal(numerator) * 100 / Decimal(denominator)).quantize(q, ROUND_HALF_UP))


def float_str(value: float | None, places: int = 3) -> str:
    if value is None:
        return ""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(value)).quantize(q, ROUND_HALF_UP))


def sensitivity_str(counts: ConfusionCounts, places: int = 3) -> str:
    return ratio_str(counts.tp, counts.n_malignant, places)


def specificity_str(counts: ConfusionCounts, places: int = 3) -> str:
    return ratio_str(counts.tn, counts.n_benign, places)


def reduction_cell(counts: ConfusionCounts) -> str:
    """"TN+FN (pct%)" as printed in the threshold table."""
    saved = counts.n_predicted_negative
    return f"{saved} ({percent_str(saved, counts.total)}%)"


SWEEP_COLUMNS = [
    "threshold",
    "sensitivity",
    "specificity",
    "tp",
    "fp",
    "tn",
    "fn",
    "fn_pct",
    "fn_isup_1",
    "fn_isup_2",
    "fn_isup_3",
    "fn_isup_4",
    "fn_isup_5",
    "ihc_reduction_count",
    "ihc_reduction_pct",
    "isup_label_level",
]


def sweep_row(report: OperatingPointReport) -> dict[str, str]:
    c = report.counts
    row = {
        "threshold": format(report.threshold, "g"),
        "sensitivity": sensitivity_str(c),
        "specificity": specificity_str(c),
        "tp": str(c.tp),
        "fp": str(c.fp),
        "tn": str(c.tn),
        "fn": str(c.fn),
        "fn_pct": percent_str(c.fn, c.n_malignant) if c.n_malignant else "",
        "ihc_reduction_count": str(report.ihc_reduction_count),
        "ihc_reduction_pct": percent_str(report.ihc_reduction_count, c.total),
        "isup_label_level": "location" if report.breakdown_location_level else "slide",
    }
    for grade in ISUP_GRADES:
        row[f"fn_isup_{grade}"] = str(report.fn_isup_breakdown.get(grade, 0))
    return row


def sweep_csv(reports: list[OperatingPointReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(sweep_row(report))
    return buf.getvalue()


def sweep_json(reports: list[OperatingPointReport], cohort_id: str = "", auc: float | None = None) -> str:
    payload = {
        "cohort_id": cohort_id,
        "n_slides": reports[0].counts.total if reports else 0,
        "auc": auc,
        "thresholds": [
            {
                "threshold": r.threshold,
                "sensitivity": r.sensitivity,
                "specificity": r.specificity,
                "tp": r.counts.tp,
                "fp": r.counts.fp,
                "tn": r.counts.tn,
                "fn": r.counts.fn,
                "fn_isup_breakdown": {str(k): v for k, v in r.fn_isup_breakdown.items()},
                "ihc_reduction_count": r.ihc_reduction_count,
                "ihc_reduction_fraction": r.ihc_reduction_fraction,
                "isup_label_level": "location" if r.breakdown_location_level else "slide",
            }
            for r in reports
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def curve_csv(points: list[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "sensitivity", "specificity"])
    for p in points:
        writer.writerow(
            [format(p.threshold, "g"), float_str(p.sensitivity, 6), float_str(p.specificity, 6)]
        )
    return buf.getvalue()


def curve_json(points: list[CurvePoint]) -> str:
    payload = [
        {"threshold": p.threshold, "sensitivity": p.sensitivity, "specificity": p.specificity}
        for p in points
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def roc_csv(curve: RocCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["fpr", "tpr"])
    for fpr, tpr in curve.points:
        writer.writerow([float_str(fpr, 6), float_str(tpr, 6)])
    return buf.getvalue()


def _agg_axes():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_tradeoff_figure(points: list[CurvePoint], path, title: str = "") -> None:
    """Sensitivity and specificity against the decision threshold."""
    plt = _agg_axes()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    thresholds = [p.threshold for p in points]
    ax.plot(thresholds, [p.sensitivity for p in points], label="Sensitivity", color="tab:red")
    ax.plot(thresholds, [p.specificity for p in points], label="Specificity", color="tab:blue")
    ax.set_xlabel("Threshold")
    ax.set_ylabel("Value")
    ax.set_xlim(0, 1)
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="center right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_roc_figure(curve: RocCurve, path, title: str = "") -> None:
    plt = _agg_axes()
    fig, ax = plt.subplots(figsize=(5, 5))
    fpr = [p[0] for p in curve.points]
    tpr = [p[1] for p in curve.points]
    ax.plot(fpr, tpr, color="tab:red", label=f"AUC = {curve.auc:.3f}")
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.8)
    ax.set_xlabel("1 - Specificity")
    ax.set_ylabel("Sensitivity")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
