import random

import pytest

from ihctriage.errors import InvalidInputError
from ihctriage.metrics import (
    LabeledPrediction,
    confusion_at,
    curve_points,
    metrics_from_counts,
    select_operating_point,
    sweep,
)
from ihctriage.metrics.report import percent_str, ratio_str, sweep_csv, sweep_row

from reference_cohorts import FN_ISUP_BREAKDOWN, REFERENCE_TABLE, suh_reconstructed_predictions


def make_cohort(rng, n, p_missing_isup=0.0):
    preds = []
    for i in range(n):
        truth = rng.choice(["benign", "malignant"])
        isup = None
        if truth == "malignant" and rng.random() >= p_missing_isup:
            isup = rng.randint(1, 5)
        preds.append(
            LabeledPrediction(
                slide_id=f"s{i}",
                truth=truth,
                cancer_probability=round(rng.random(), 3),
                truth_isup=isup,
            )
        )
    return preds


def test_sweep_reproduces_reference_rows():
    preds = suh_reconstructed_predictions()
    grid = [0.50, 0.20, 0.10, 0.01]
    reports = sweep(preds, grid)
    for report, threshold in zip(reports, grid):
        key = f"{threshold:.2f}"
        ref = REFERENCE_TABLE[("SUH", "TS")][key]
        c = report.counts
        assert (c.tp, c.fp, c.tn, c.fn) == (ref["tp"], ref["fp"], ref["tn"], ref["fn"])
        assert report.fn_isup_breakdown == FN_ISUP_BREAKDOWN["SUH"][key]
        assert report.ihc_reduction_count == ref["red_count"]


def test_sweep_single_threshold_trivial():
    preds = [
        LabeledPrediction(slide_id="a", truth="malignant", cancer_probability=0.9),
        LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.1),
    ]
    (report,) = sweep(preds, [0.5])
    assert report.sensitivity == 1.0
    assert report.specificity == 1.0


def test_sweep_rows_equal_composition():
    rng = random.Random(9)
    for _ in range(30):
        preds = make_cohort(rng, rng.randint(5, 120))
        grid = sorted({round(rng.uniform(0.01, 1.0), 2) for _ in range(rng.randint(1, 6))})
        for report in sweep(preds, grid):
            counts = confusion_at(preds, report.threshold)
            metrics = metrics_from_counts(counts)
            assert report.counts == counts
            assert report.sensitivity == metrics.sensitivity
            assert report.specificity == metrics.specificity
            assert report.ihc_reduction_count == counts.tn + counts.fn
            assert sum(report.fn_isup_breakdown.values()) <= counts.fn


def test_sweep_rejects_bad_grid():
    preds = [LabeledPrediction(slide_id="a", truth="benign", cancer_probability=0.1)]
    with pytest.raises(InvalidInputError):
        sweep(preds, [])
    with pytest.raises(InvalidInputError):
        sweep(preds, [0.0])
    with pytest.raises(InvalidInputError):
        sweep(preds, [1.2])


def test_location_level_flag_propagates():
    preds = [
        LabeledPrediction(
            slide_id="a", truth="malignant", cancer_probability=0.2, truth_isup=2,
            label_level="location",
        ),
        LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.1),
    ]
    (report,) = sweep(preds, [0.5])
    assert report.breakdown_location_level
    assert sweep_row(report)["isup_label_level"] == "location"


def test_select_operating_point_examples():
    def cal(probs):
        return [
            LabeledPrediction(slide_id=f"m{i}", truth="malignant", cancer_probability=p)
            for i, p in enumerate(probs)
        ]

    selected = select_operating_point(cal([0.013, 0.4, 0.9]), 1.0, [0.5, 0.2, 0.1, 0.01])
    assert selected.threshold == 0.01 and selected.target_met

    selected = select_operating_point(cal([0.0, 0.9]), 1.0, [0.5, 0.2, 0.1, 0.01])
    assert selected.threshold == 0.01 and not selected.target_met


def test_select_operating_point_matches_grid_scan():
    rng = random.Random(21)
    for _ in range(200):
        preds = make_cohort(rng, rng.randint(4, 60))
        if not any(p.is_malignant for p in preds):
            preds.append(LabeledPrediction(slide_id="m", truth="malignant", cancer_probability=0.5))
        grid = sorted({round(rng.uniform(0.01, 1.0), 2) for _ in range(rng.randint(1, 8))})
        target = rng.choice([0.8, 0.9, 0.95, 1.0])
        selected = select_operating_point(preds, target, grid)

        qualifying = []
        for t in grid:
            counts = confusion_at(preds, t)
            if counts.tp / counts.n_malignant >= target:
                qualifying.append(t)
        if qualifying:
            assert selected.target_met and selected.threshold == max(qualifying)
        else:
            assert not selected.target_met and selected.threshold == min(grid)


def test_select_operating_point_validation():
    preds = [LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.1)]
    with pytest.raises(InvalidInputError):
        select_operating_point(preds, 1.0, [0.5])  # no malignant slide
    with pytest.raises(InvalidInputError):
        select_operating_point(
            [LabeledPrediction(slide_id="m", truth="malignant", cancer_probability=0.9)], 1.0, []
        )


def test_monotonicity_over_random_grids():
    rng = random.Random(33)
    for _ in range(60):
        preds = make_cohort(rng, rng.randint(10, 150))
        if not any(p.is_malignant for p in preds):
            preds.append(LabeledPrediction(slide_id="m", truth="malignant", cancer_probability=0.7))
        if all(p.is_malignant for p in preds):
            preds.append(LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.2))
        grid = sorted({round(rng.uniform(0.01, 1.0), 3) for _ in range(10)})
        reports = sweep(preds, grid)
        for lo, hi in zip(reports, reports[1:]):
            assert lo.sensitivity >= hi.sensitivity
            assert lo.specificity <= hi.specificity


def test_curve_points_step_quarter():
    preds = [
        LabeledPrediction(slide_id="a", truth="malignant", cancer_probability=0.9),
        LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.1),
    ]
    points = curve_points(preds, 0.25)
    assert [p.threshold for p in points] == [0.25, 0.5, 0.75, 1.0]
    sens = [p.sensitivity for p in points]
    assert sens == sorted(sens, reverse=True)


def test_curve_points_step_validation():
    preds = [
        LabeledPrediction(slide_id="a", truth="malignant", cancer_probability=0.9),
        LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.1),
    ]
    with pytest.raises(InvalidInputError):
        curve_points(preds, 0.0)
    with pytest.raises(InvalidInputError):
        curve_points(preds, 0.6)


def test_curve_points_perfect_classifier():
    preds = [
        LabeledPrediction(slide_id="a", truth="malignant", cancer_probability=0.6),
        LabeledPrediction(slide_id="b", truth="benign", cancer_probability=0.1),
    ]
    for point in curve_points(preds, 0.1):
        if point.threshold <= 0.6:
            assert point.sensitivity == 1.0


def test_sweep_csv_columns_and_values():
    preds = suh_reconstructed_predictions()
    reports = sweep(preds, [0.50, 0.01])
    text = sweep_csv(reports)
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    assert header[:8] == [
        "threshold", "sensitivity", "specificity", "tp", "fp", "tn", "fn", "fn_pct",
    ]
    row = dict(zip(header, lines[1].split(",")))
    assert row["sensitivity"] == "0.914"
    assert row["specificity"] == "0.930"
    assert row["fn_isup_1"] == "6"
    assert row["ihc_reduction_count"] == "129"
    row = dict(zip(header, lines[2].split(",")))
    assert row["ihc_reduction_pct"] == percent_str(104, 234) == "44.4"
    assert ratio_str(104, 129) == "0.806"
