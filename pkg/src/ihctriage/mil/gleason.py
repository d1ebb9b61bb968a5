"""Gleason pattern pairs, score labels, and the ISUP grade-group translation."""

from __future__ import annotations

from ..errors import InvalidInputError

BENIGN = "benign"
PATTERNS = (3, 4, 5)

_ISUP_TABLE = {
    (3, 3): 1,
    (3, 4): 2,
    (4, 3): 3,
    (4, 4): 4,
    (3, 5): 4,
    (5, 3): 4,
    (4, 5): 5,
    (5, 4): 5,
    (5, 5): 5,
}


def gleason_to_isup(primary, secondary):
    """Translate a (primary, secondary) pattern pair into an ISUP grade group.

    Accepts patterns in {3, 4, 5} or the string "benign"; benign may only be
    paired with benign and maps to "benign". Returns an int 1..5 otherwise.
    """
    if primary == BENIGN or secondary == BENIGN:
        if primary == BENIGN and secondary == BENIGN:
            return BENIGN
        raise InvalidInputError(
            f"benign pattern paired with {primary!r}+{secondary!r}"
        )
    try:
        return _ISUP_TABLE[(primary, secondary)]
    except (KeyError, TypeError):
        raise InvalidInputError(
            f"not a valid Gleason pattern pair: {primary!r}+{secondary!r}"
        ) from None


def score_label(primary, secondary) -> str:
    """Render a pattern pair as "p+s", or "benign"."""
    if primary == BENIGN and secondary == BENIGN:
        return BENIGN
    gleason_to_isup(primary, secondary)  # validates
    return f"{primary}+{secondary}"


def parse_score_label(label: str):
    """Inverse of score_label: "4+3" -> (4, 3), "benign" -> (BENIGN, BENIGN)."""
    if label == BENIGN:
        return (BENIGN, BENIGN)
    try:
        primary, secondary = (int(part) for part in label.split("+"))
    except ValueError:
        raise InvalidInputError(f"unparseable Gleason score: {label!r}") from None
    gleason_to_isup(primary, secondary)
    return (primary, secondary)


def isup_rank(isup) -> int:
    """Order ISUP values with benign below grade 1 (for tie-breaking)."""
    return 0 if isup == BENIGN else int(isup)


def score_sort_key(primary, secondary):
    """Total order on scores: ISUP first, then primary, then secondary."""
    if primary == BENIGN:
        return (0, 0, 0)
    return (gleason_to_isup(primary, secondary), primary, secondary)
