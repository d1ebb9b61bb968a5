"""Aggregation of the 30-member (10 folds x 3 TTA) ensemble.

The slide-level Gleason score is the majority vote over the 30 member
scores (ties broken toward the higher ISUP translation), the cancer
probability is the median of the 30 member probabilities, and the per-tile
attention is the member mean renormalized to sum to 1.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidEnsembleError
from .abmil import EmbeddingBag, HeadParams, MemberPrediction, predict_member
from .gleason import BENIGN, gleason_to_isup, parse_score_label, score_sort_key

N_FOLDS = 10
N_TTA = 3
MEMBER_IDS = tuple((fold, tta) for fold in range(N_FOLDS) for tta in range(N_TTA))


@dataclass(frozen=True)
class EnsemblePrediction:
    slide_id: str
    members: tuple[MemberPrediction, ...]
    final_gleason: str
    final_isup: object  # BENIGN | 1..5
    cancer_probability: float
    mean_attention: np.ndarray
    anchors: tuple[tuple[int, int], ...]


def majority_gleason(labels) -> str:
    """Mode of the score labels; modal ties go to the highest-ranked score."""
    votes = Counter(labels)
    top = max(votes.values())
    modal = [label for label, count in votes.items() if count == top]
    return max(modal, key=lambda label: score_sort_key(*parse_score_label(label)))


def median_probability(probabilities) -> float:
    """Median as the mean of the two central order statistics."""
    ordered = sorted(probabilities)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return float(ordered[mid])
    return float((ordered[mid - 1] + ordered[mid]) / 2.0)


def aggregate_ensemble(members, slide_id: str = "") -> EnsemblePrediction:
    members = tuple(members)
    if len(members) != len(MEMBER_IDS):
        raise InvalidEnsembleError(f"expected {len(MEMBER_IDS)} members, got {len(members)}")
    ids = [m.member_id for m in members]
    if sorted(ids) != sorted(MEMBER_IDS):
        raise InvalidEnsembleError("members must cover every (fold, tta) pair exactly once")
    anchors = members[0].anchors
    for m in members[1:]:
        if m.anchors != anchors:
            raise InvalidEnsembleError("members reference different tile sets")

    final_gleason = majority_gleason(m.gleason for m in members)
    primary, secondary = parse_score_label(final_gleason)
    probability = median_probability(m.cancer_probability for m in members)
    stacked = np.stack([m.attention for m in members])
    mean_attention = stacked.mean(axis=0)
    mean_attention = mean_attention / mean_attention.sum()
    mean_attention.setflags(write=False)
    return EnsemblePrediction(
        slide_id=slide_id,
        members=members,
        final_gleason=final_gleason,
        final_isup=gleason_to_isup(primary, secondary),
        cancer_probability=probability,
        mean_attention=mean_attention,
        anchors=anchors,
    )


def run_ensemble(bags, bundle: dict[tuple[int, int], HeadParams]) -> EnsemblePrediction:
    """Predict all 30 members and aggregate.

    `bags` is either a single EmbeddingBag applied to every member or a
    mapping member_id -> EmbeddingBag (e.g. one bag per TTA pass).
    """
    if isinstance(bags, EmbeddingBag):
        bag_for = {member_id: bags for member_id in MEMBER_IDS}
        slide_id = bags.slide_id
    else:
        bag_for = dict(bags)
        slide_id = next(iter(bag_for.values())).slide_id
    missing = [m for m in MEMBER_IDS if m not in bag_for]
    if missing:
        raise InvalidEnsembleError(f"no embedding bag for members {missing}")
    predictions = [predict_member(bag_for[mid], bundle[mid]) for mid in MEMBER_IDS]
    return aggregate_ensemble(predictions, slide_id=slide_id)


def prediction_to_json(prediction: EnsemblePrediction) -> str:
    payload = {
        "slide_id": prediction.slide_id,
        "final_isup": str(prediction.final_isup) if prediction.final_isup == BENIGN else prediction.final_isup,
        "final_gleason": prediction.final_gleason,
        "cancer_probability": prediction.cancer_probability,
        "members": [
            {
                "fold": m.member_id[0],
                "tta": m.member_id[1],
                "gleason": m.gleason,
                "isup": str(m.isup) if m.isup == BENIGN else m.isup,
                "cancer_probability": m.cancer_probability,
            }
            for m in prediction.members
        ],
        "mean_attention": [
            {"anchor": [x, y], "value": float(v)}
            for (x, y), v in zip(prediction.anchors, prediction.mean_attention)
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def prediction_summary(prediction: EnsemblePrediction) -> dict:
    return {
        "slide_id": prediction.slide_id,
        "final_isup": prediction.final_isup,
        "final_gleason": prediction.final_gleason,
        "cancer_probability": prediction.cancer_probability,
    }
