from .abmil import (
    EmbeddingBag,
    HeadParams,
    MemberPrediction,
    attention_pool,
    classify,
    predict_member,
)
from .bundle import load_bundle, random_bundle, save_bundle
from .ensemble import (
    MEMBER_IDS,
    EnsemblePrediction,
    aggregate_ensemble,
    majority_gleason,
    median_probability,
    prediction_summary,
    prediction_to_json,
    run_ensemble,
)
from .gleason import BENIGN, PATTERNS, gleason_to_isup, parse_score_label, score_label
from .heatmap import load_heatmap_png, render_heatmap, save_heatmap_png

__all__ = [
    "BENIGN",
    "PATTERNS",
    "EmbeddingBag",
    "HeadParams",
    "MemberPrediction",
    "EnsemblePrediction",
    "MEMBER_IDS",
    "attention_pool",
    "classify",
    "predict_member",
    "aggregate_ensemble",
    "majority_gleason",
    "median_probability",
    "run_ensemble",
    "prediction_to_json",
    "prediction_summary",
    "gleason_to_isup",
    "score_label",
    "parse_score_label",
    "render_heatmap",
    "save_heatmap_png",
    "load_heatmap_png",
    "load_bundle",
    "save_bundle",
    "random_bundle",
]
