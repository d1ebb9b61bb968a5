from .confusion import (
    BENIGN,
    MALIGNANT,
    ConfusionCounts,
    IhcReduction,
    LabeledPrediction,
    PointMetrics,
    confusion_at,
    ihc_reduction,
    metrics_from_counts,
)
from .roc import RocCurve, roc_and_auc
from .sweep import (
    DEFAULT_GRID,
    CurvePoint,
    OperatingPointReport,
    SelectedOperatingPoint,
    curve_points,
    report_at,
    select_operating_point,
    sweep,
)

__all__ = [
    "BENIGN",
    "MALIGNANT",
    "ConfusionCounts",
    "IhcReduction",
    "LabeledPrediction",
    "PointMetrics",
    "RocCurve",
    "confusion_at",
    "ihc_reduction",
    "metrics_from_counts",
    "roc_and_auc",
    "DEFAULT_GRID",
    "CurvePoint",
    "OperatingPointReport",
    "SelectedOperatingPoint",
    "curve_points",
    "report_at",
    "select_operating_point",
    "sweep",
]
