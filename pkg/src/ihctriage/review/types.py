"""Domain objects for the recommendation and review workflow."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidInputError

IHC_RECOMMENDED = "ihc_recommended"
IHC_NOT_RECOMMENDED = "ihc_not_recommended"

DIAGNOSES = (
    "benign",
    "atypia_sfc",
    "isup_1",
    "isup_2",
    "isup_3",
    "isup_4",
    "isup_5",
    "suspicious_ductal",
)

DECOY_CLASSES = ("benign", 1, 2, 3, 4, 5)

OUTCOME_CONFIRMED_BENIGN = "confirmed_benign"
OUTCOME_SHOWED_CANCER = "ihc_showed_cancer"


@dataclass(frozen=True)
class SlideInfo:
    """Everything the service knows about one slide."""

    slide_id: str
    cancer_probability: float
    final_isup: object = None  # advisory AI grade
    final_gleason: str | None = None
    heatmap_path: str | None = None
    image_ref: str | None = None
    reference_class: object = None  # ground truth: "benign" | 1..5 | None
    cohort_id: str = ""


@dataclass(frozen=True)
class Recommendation:
    slide_id: str
    cancer_probability: float
    operating_threshold: float
    verdict: str
    heatmap_ref: str | None
    final_isup: object

    def __post_init__(self):
        expected = (
            IHC_RECOMMENDED
            if self.cancer_probability >= self.operating_threshold
            else IHC_NOT_RECOMMENDED
        )
        if self.verdict != expected:
            raise InvalidInputError("verdict inconsistent with probability and threshold")


def verdict_for(probability: float, threshold: float) -> str:
    return IHC_RECOMMENDED if probability >= threshold else IHC_NOT_RECOMMENDED


@dataclass(frozen=True)
class ReviewCase:
    case_id: str
    slide_id: str
    blinded: bool
    is_decoy: bool
    image_ref: str | None = None


@dataclass(frozen=True)
class Decision:
    case_id: str
    reviewer_id: str
    diagnosis: str
    ihc_required: bool
    timestamp: str
    note: str = ""

    def __post_init__(self):
        if self.diagnosis not in DIAGNOSES:
            raise InvalidInputError(
                f"diagnosis must be one of {DIAGNOSES}, got {self.diagnosis!r}"
            )


@dataclass
class ReviewSession:
    session_id: str
    reviewer_id: str
    cases: tuple[ReviewCase, ...]  # order fixed at creation
    seed: int
    blinded: bool = True
    state: str = "open"  # open | finalized
    decisions: dict[str, Decision] = field(default_factory=dict)  # by case_id

    @property
    def is_open(self) -> bool:
        return self.state == "open"


@dataclass(frozen=True)
class TrustMonitor:
    """Running cross-check of AI-negative slides against later IHC results."""

    confirmed_benign: int = 0
    ihc_showed_cancer: int = 0

    @property
    def npv(self) -> float | None:
        total = self.confirmed_benign + self.ihc_showed_cancer
        return self.confirmed_benign / total if total else None

    def updated(self, outcome: str) -> "TrustMonitor":
        if outcome == OUTCOME_CONFIRMED_BENIGN:
            return TrustMonitor(self.confirmed_benign + 1, self.ihc_showed_cancer)
        if outcome == OUTCOME_SHOWED_CANCER:
            return TrustMonitor(self.confirmed_benign, self.ihc_showed_cancer + 1)
        raise InvalidInputError(f"unknown IHC outcome {outcome!r}")
