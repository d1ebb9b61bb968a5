import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ihctriage.errors import UndefinedMetricError
from ihctriage.metrics import LabeledPrediction, roc_and_auc

from oracles import auc_pairwise, auc_pairwise_fast


def cohort(pos_scores, neg_scores):
    preds = [
        LabeledPrediction(slide_id=f"p{i}", truth="malignant", cancer_probability=s)
        for i, s in enumerate(pos_scores)
    ]
    preds += [
        LabeledPrediction(slide_id=f"n{i}", truth="benign", cancer_probability=s)
        for i, s in enumerate(neg_scores)
    ]
    return preds


def test_perfect_separation():
    curve = roc_and_auc(cohort([0.8, 0.9], [0.1, 0.2]))
    assert curve.auc == 1.0


def test_all_tied_is_chance_level():
    curve = roc_and_auc(cohort([0.5, 0.5, 0.5], [0.5, 0.5]))
    assert curve.auc == pytest.approx(0.5)


def test_single_class_undefined():
    with pytest.raises(UndefinedMetricError):
        roc_and_auc(cohort([0.4, 0.6], []))


def test_curve_shape():
    curve = roc_and_auc(cohort([0.9, 0.6, 0.6], [0.6, 0.2]))
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)
    fprs = [p[0] for p in curve.points]
    tprs = [p[1] for p in curve.points]
    assert fprs == sorted(fprs)
    assert tprs == sorted(tprs)


def test_matches_pairwise_oracle_small():
    rng = random.Random(3)
    for _ in range(50):
        pos = [rng.choice([0.1, 0.3, 0.5, 0.7, 0.9]) for _ in range(rng.randint(1, 20))]
        neg = [rng.choice([0.1, 0.3, 0.5, 0.7, 0.9]) for _ in range(rng.randint(1, 20))]
        assert roc_and_auc(cohort(pos, neg)).auc == pytest.approx(
            auc_pairwise(pos, neg), abs=1e-12
        )


def test_matches_pairwise_oracle_large():
    rng = random.Random(11)
    for _ in range(40):
        n_pos = rng.randint(1, 250)
        n_neg = rng.randint(1, 250)
        pos = [round(rng.random(), 2) for _ in range(n_pos)]  # coarse -> plenty of ties
        neg = [round(rng.random(), 2) for _ in range(n_neg)]
        assert abs(roc_and_auc(cohort(pos, neg)).auc - auc_pairwise_fast(pos, neg)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(
    pos=st.lists(st.integers(0, 20), min_size=1, max_size=40),
    neg=st.lists(st.integers(0, 20), min_size=1, max_size=40),
)
def test_invariant_under_monotone_transform(pos, neg):
    plain = roc_and_auc(cohort([s / 20 for s in pos], [s / 20 for s in neg])).auc

    def squash(s):  # strictly increasing map into (0, 1)
        return 1.0 / (1.0 + 2.718 ** -(3 * s - 1.5))

    warped = roc_and_auc(cohort([squash(s / 20) for s in pos], [squash(s / 20) for s in neg])).auc
    assert warped == pytest.approx(plain, abs=1e-12)
