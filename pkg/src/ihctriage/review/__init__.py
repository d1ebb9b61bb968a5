from .service import DEFAULT_THRESHOLD, ReviewService
from .types import (
    DECOY_CLASSES,
    DIAGNOSES,
    IHC_NOT_RECOMMENDED,
    IHC_RECOMMENDED,
    OUTCOME_CONFIRMED_BENIGN,
    OUTCOME_SHOWED_CANCER,
    Decision,
    Recommendation,
    ReviewCase,
    ReviewSession,
    SlideInfo,
    TrustMonitor,
    verdict_for,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "ReviewService",
    "DECOY_CLASSES",
    "DIAGNOSES",
    "IHC_NOT_RECOMMENDED",
    "IHC_RECOMMENDED",
    "OUTCOME_CONFIRMED_BENIGN",
    "OUTCOME_SHOWED_CANCER",
    "Decision",
    "Recommendation",
    "ReviewCase",
    "ReviewSession",
    "SlideInfo",
    "TrustMonitor",
    "verdict_for",
]
