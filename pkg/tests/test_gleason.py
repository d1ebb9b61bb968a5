import pytest

from ihctriage.errors import InvalidInputError
from ihctriage.mil.gleason import (
    BENIGN,
    gleason_to_isup,
    parse_score_label,
    score_label,
    score_sort_key,
)

EXHAUSTIVE = {
    (3, 3): 1,
    (3, 4): 2,
    (4, 3): 3,
    (4, 4): 4,
    (3, 5): 4,
    (5, 3): 4,
    (4, 5): 5,
    (5, 4): 5,
    (5, 5): 5,
    (BENIGN, BENIGN): BENIGN,
}


@pytest.mark.parametrize("pair,expected", sorted(EXHAUSTIVE.items(), key=str))
def test_exhaustive_translation(pair, expected):
    assert gleason_to_isup(*pair) == expected


def test_examples():
    assert gleason_to_isup(3, 3) == 1
    assert gleason_to_isup(5, 4) == 5
    assert gleason_to_isup(BENIGN, BENIGN) == BENIGN


@pytest.mark.parametrize("pair", [(BENIGN, 3), (4, BENIGN), (2, 3), (3, 6), ("x", 3)])
def test_invalid_pairs_rejected(pair):
    with pytest.raises(InvalidInputError):
        gleason_to_isup(*pair)


def test_score_label_round_trip():
    for pair in EXHAUSTIVE:
        assert parse_score_label(score_label(*pair)) == pair


def test_sort_key_orders_benign_below_grade_one():
    assert score_sort_key(BENIGN, BENIGN) < score_sort_key(3, 3)
    assert score_sort_key(3, 5) < score_sort_key(4, 5)
    # same ISUP group, higher primary wins
    assert score_sort_key(4, 4) > score_sort_key(3, 5)
