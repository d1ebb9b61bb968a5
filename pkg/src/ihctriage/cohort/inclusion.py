"""CONSORT-style inclusion accounting for basal-cell IHC slides.

Only slides where IHC targeting basal cells was requested qualify for
evaluation; the ledger records how many slides each filter stage kept and
why each excluded slide fell out.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import InvalidInputError
from .manifest import CohortManifest, SlideRecord

# Basal-cell markers; matching is case-insensitive on a space-stripped form,
# so "HMWCK", "CK903/34 β E12", and "p63 + P504S/AMACR" all qualify.
BASAL_MARKERS = ("hmwck", "p63", "ck903", "34be12", "34βe12", "ck5/6")

REASON_NO_IHC = "no IHC requested"
REASON_NO_BASAL = "no basal-cell marker stain"
REASON_STAIN_UNKNOWN = "stain type unknown"


@dataclass(frozen=True)
class InclusionLedger:
    stages: tuple[tuple[str, int], ...]
    exclusions: tuple[tuple[str, str], ...]  # (slide_id, reason)

    def __post_init__(self):
        counts = [count for _, count in self.stages]
        if any(b > a for a, b in zip(counts, counts[1:])):
            raise InvalidInputError("stage counts must be non-increasing")
        if counts and counts[0] - counts[-1] != len(self.exclusions):
            raise InvalidInputError("exclusions must account for every dropped slide")

    @property
    def included_count(self) -> int:
        return self.stages[-1][1]

    def reason_counts(self) -> dict[str, int]:
        return dict(Counter(reason for _, reason in self.exclusions))

    def to_dict(self) -> dict:
        return {
            "stages": [{"stage": name, "count": count} for name, count in self.stages],
            "exclusions": [
                {"slide_id": slide_id, "reason": reason} for slide_id, reason in self.exclusions
            ],
            "reason_counts": self.reason_counts(),
        }


def is_basal_stain(stain_type: str | None) -> bool | None:
    """True/False for known stains, None when the stain text is missing."""
    if stain_type is None or not stain_type.strip():
        return None
    normalized = stain_type.lower().replace(" ", "")
    return any(marker in normalized for marker in BASAL_MARKERS)


def filter_ihc_basal(manifest: CohortManifest):
    """Keep slides with a basal-cell IHC request; returns (slides, ledger)."""
    exclusions: list[tuple[str, str]] = []
    with_ihc: list[SlideRecord] = []
    for slide in manifest.slides:
        if slide.ihc_requested:
            with_ihc.append(slide)
        else:
            exclusions.append((slide.slide_id, REASON_NO_IHC))
    included: list[SlideRecord] = []
    for slide in with_ihc:
        basal = is_basal_stain(slide.stain_type)
        if basal:
            included.append(slide)
        elif basal is None:
            exclusions.append((slide.slide_id, REASON_STAIN_UNKNOWN))
        else:
            exclusions.append((slide.slide_id, REASON_NO_BASAL))
    ledger = InclusionLedger(
        stages=(
            ("all slides", len(manifest.slides)),
            ("IHC requested", len(with_ihc)),
            ("basal-cell stain", len(included)),
        ),
        exclusions=tuple(exclusions),
    )
    return included, ledger
