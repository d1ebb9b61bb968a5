"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with `pytest -v -s tests/test_acceptance.py` to see the per-criterion
lines. The reference-table regression asserts every published figure; the
eight published cells that contradict their own published counts (see
reference_cohorts.INCONSISTENT_CELLS) are strict expected-failures, and a
companion test pins the arithmetically forced values for those cells so
the formulas stay covered.
"""

import filecmp
import math
import random
import time

import numpy as np
import pytest

from ihctriage.metrics import (
    ConfusionCounts,
    LabeledPrediction,
    confusion_at,
    roc_and_auc,
    select_operating_point,
    sweep,
)
from ihctriage.metrics.report import percent_str, ratio_str
from ihctriage.mil import (
    MEMBER_IDS,
    EmbeddingBag,
    MemberPrediction,
    aggregate_ensemble,
    attention_pool,
    gleason_to_isup,
    predict_member,
)
from ihctriage.mil.gleason import BENIGN
from ihctriage.tiling import (
    PatchRecord,
    PyramidLevel,
    SlidePyramid,
    TissueMask,
    extract,
    iter_archive,
    plan_grid,
    read_archive,
    write_archive,
)

from oracles import (
    attention_loop,
    auc_pairwise_fast,
    grid_axis_loop,
    majority_vote_loop,
    median_sort_loop,
)
from reference_cohorts import COHORT_SIZES, INCONSISTENT_CELLS, REFERENCE_TABLE


def _passed(name):
    print(f"\nACCEPTANCE {name}: PASS")


# --- reference-table regression ------------------------------------------------

def _cells():
    cells = []
    for (cohort, model), rows in sorted(REFERENCE_TABLE.items()):
        for threshold, ref in sorted(rows.items()):
            for figure in ("sens", "spec", "red_count", "red_pct"):
                key = (cohort, model, threshold, figure)
                marks = ()
                if key in INCONSISTENT_CELLS:
                    marks = pytest.mark.xfail(
                        strict=True,
                        reason="published figure contradicts its own published counts",
                    )
                cells.append(pytest.param(cohort, model, threshold, figure, marks=marks,
                                          id=f"{cohort}-{model}-{threshold}-{figure}"))
    return cells


def _computed_figure(cohort, model, threshold, figure):
    ref = REFERENCE_TABLE[(cohort, model)][threshold]
    counts = ConfusionCounts(
        tp=ref["tp"], fp=ref["fp"], tn=ref["tn"], fn=ref["fn"], threshold=float(threshold)
    )
    n = COHORT_SIZES[cohort]
    assert counts.total == n
    if figure == "sens":
        return ratio_str(counts.tp, counts.n_malignant)
    if figure == "spec":
        return ratio_str(counts.tn, counts.n_benign)
    if figure == "red_count":
        return counts.n_predicted_negative
    return percent_str(counts.n_predicted_negative, n)


@pytest.mark.parametrize("cohort,model,threshold,figure", _cells())
def test_reference_table_regression(cohort, model, threshold, figure):
    ref = REFERENCE_TABLE[(cohort, model)][threshold]
    assert _computed_figure(cohort, model, threshold, figure) == ref[figure]


def test_reference_table_inconsistent_cells_match_their_counts():
    # For the eight typo cells the formulas must produce the value the
    # printed counts force, not the printed (impossible) figure.
    for (cohort, model, threshold, figure), forced in INCONSISTENT_CELLS.items():
        assert _computed_figure(cohort, model, threshold, figure) == forced
        assert forced != REFERENCE_TABLE[(cohort, model)][threshold][figure]


def test_reference_table_runtime_and_summary():
    start = time.perf_counter()
    good = bad = 0
    for (cohort, model), rows in REFERENCE_TABLE.items():
        for threshold, ref in rows.items():
            for figure in ("sens", "spec", "red_count", "red_pct"):
                computed = _computed_figure(cohort, model, threshold, figure)
                if computed == ref[figure]:
                    good += 1
                else:
                    bad += 1
                    assert (cohort, model, threshold, figure) in INCONSISTENT_CELLS
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    assert bad == len(INCONSISTENT_CELLS) == 8
    print(
        f"\nACCEPTANCE reference-table regression: PASS"
        f" ({good}/{good + bad} published cells reproduced in {elapsed * 1000:.0f} ms;"
        f" {bad} cells are inconsistent within the published tables themselves"
        f" and are tracked as strict xfails)"
    )


# --- AUC oracle equivalence ----------------------------------------------------

def test_auc_equals_mann_whitney_oracle_on_1000_sets():
    rng = random.Random(2024)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(1000):
        n = rng.randint(2, 500)
        n_pos = rng.randint(1, n - 1)
        decimals = rng.choice([1, 2, 2, 3, None])  # coarse scores force ties
        def draw():
            value = rng.random()
            return round(value, decimals) if decimals else value
        pos = [draw() for _ in range(n_pos)]
        neg = [draw() for _ in range(n - n_pos)]
        preds = [
            LabeledPrediction(slide_id=f"p{i}", truth="malignant", cancer_probability=s)
            for i, s in enumerate(pos)
        ] + [
            LabeledPrediction(slide_id=f"n{i}", truth="benign", cancer_probability=s)
            for i, s in enumerate(neg)
        ]
        auc = roc_and_auc(preds).auc
        oracle = auc_pairwise_fast(pos, neg)
        worst = max(worst, abs(auc - oracle))
        assert abs(auc - oracle) < 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _passed(f"AUC oracle equivalence (1000 sets, max |diff| {worst:.2e}, {elapsed:.1f} s)")


# --- zero-FN calibration guarantee ---------------------------------------------

def test_zero_fn_at_target_sensitivity_one():
    rng = random.Random(77)
    for _ in range(200):
        n_mal = rng.randint(1, 120)
        n_ben = rng.randint(1, 120)
        # cohorts constructed so the grid can reach sensitivity 1.0:
        # every malignant probability is at or above the smallest grid value
        preds = [
            LabeledPrediction(
                slide_id=f"m{i}", truth="malignant",
                cancer_probability=round(rng.uniform(0.02, 1.0), 4),
            )
            for i in range(n_mal)
        ] + [
            LabeledPrediction(
                slide_id=f"b{i}", truth="benign",
                cancer_probability=round(rng.random(), 4),
            )
            for i in range(n_ben)
        ]
        grid = sorted({0.01} | {round(rng.uniform(0.02, 1.0), 3) for _ in range(6)})
        selected = select_operating_point(preds, 1.0, grid)
        assert selected.target_met
        counts = confusion_at(preds, selected.threshold)
        assert counts.fn == 0
    _passed("zero-FN guarantee at target sensitivity 1.0 (200 cohorts)")


# --- threshold monotonicity ----------------------------------------------------

def test_threshold_monotonicity_200_cohorts():
    rng = random.Random(55)
    for _ in range(200):
        n = rng.randint(2, 150)
        preds = [
            LabeledPrediction(
                slide_id=f"s{i}",
                truth=rng.choice(["benign", "malignant"]),
                cancer_probability=round(rng.random(), rng.choice([1, 2, 4])),
            )
            for i in range(n)
        ]
        grid = sorted({round(rng.uniform(0.001, 1.0), 3) for _ in range(rng.randint(2, 12))})
        previous_sens = None
        previous_spec = None
        for threshold in grid:  # increasing
            counts = confusion_at(preds, threshold)
            sens = counts.tp / counts.n_malignant if counts.n_malignant else None
            spec = counts.tn / counts.n_benign if counts.n_benign else None
            if previous_sens is not None and sens is not None:
                assert sens <= previous_sens
            if previous_spec is not None and spec is not None:
                assert spec >= previous_spec
            previous_sens = sens if sens is not None else previous_sens
            previous_spec = spec if spec is not None else previous_spec
    _passed("threshold monotonicity (200 cohorts)")


# --- ensemble aggregation oracles ----------------------------------------------

SCORES = ["benign", "3+3", "3+4", "4+3", "4+4", "3+5", "5+3", "4+5", "5+4", "5+5"]


def test_ensemble_matches_oracles_on_10000_ensembles():
    rng = np.random.default_rng(999)
    anchors = ((0, 0),)
    attention = np.array([1.0])
    start = time.perf_counter()
    for _ in range(10_000):
        labels = [SCORES[i] for i in rng.integers(0, len(SCORES), 30)]
        probs = np.round(rng.random(30), 4)
        members = []
        for i, member_id in enumerate(MEMBER_IDS):
            label = labels[i]
            if label == BENIGN:
                primary = secondary = BENIGN
            else:
                primary, secondary = (int(x) for x in label.split("+"))
            members.append(
                MemberPrediction(
                    member_id=member_id,
                    primary_pattern=primary,
                    secondary_pattern=secondary,
                    gleason=label,
                    isup=gleason_to_isup(primary, secondary),
                    cancer_probability=float(probs[i]),
                    attention=attention,
                    anchors=anchors,
                )
            )
        prediction = aggregate_ensemble(members, slide_id="x")
        assert prediction.final_gleason == majority_vote_loop(labels)
        expected_median = median_sort_loop(probs.tolist())
        assert prediction.cancer_probability == pytest.approx(expected_median, abs=1e-12)
        ordered = np.sort(probs)
        assert prediction.cancer_probability == pytest.approx(
            (ordered[14] + ordered[15]) / 2, abs=1e-12
        )
    elapsed = time.perf_counter() - start
    _passed(f"ensemble vote/median oracles (10000 ensembles, {elapsed:.1f} s)")


# --- ABMIL correctness -----------------------------------------------------------

def test_abmil_oracle_sums_and_permutation_1000_bags():
    rng = np.random.default_rng(123)
    from ihctriage.mil import HeadParams

    for _ in range(1000):
        n = int(rng.integers(1, 14))
        d = int(rng.integers(2, 12))
        l = int(rng.integers(1, 8))
        anchors = []
        seen = set()
        while len(anchors) < n:
            a = (int(rng.integers(0, 4096)), int(rng.integers(0, 4096)))
            if a not in seen:
                seen.add(a)
                anchors.append(a)
        features = rng.normal(0, 1, (n, d))
        params = HeadParams(
            member_id=(int(rng.integers(0, 10)), int(rng.integers(0, 3))),
            attention_v=rng.normal(0, 1, (d, l)),
            attention_w=rng.normal(0, 1, l),
            primary_weight=rng.normal(0, 1, (4, d)),
            primary_bias=rng.normal(0, 1, 4),
            secondary_weight=rng.normal(0, 1, (4, d)),
            secondary_bias=rng.normal(0, 1, 4),
            cancer_weight=rng.normal(0, 1, d),
            cancer_bias=float(rng.normal(0, 1)),
        )
        bag = EmbeddingBag(slide_id="s", anchors=tuple(anchors), features=features)
        pooled, attention = attention_pool(bag, params)
        assert abs(attention.sum() - 1.0) <= 1e-6
        oracle_pooled, oracle_attention = attention_loop(
            bag.features.tolist(), params.attention_v.tolist(), params.attention_w.tolist()
        )
        assert np.abs(attention - np.asarray(oracle_attention)).max() < 1e-9
        assert np.abs(pooled - np.asarray(oracle_pooled)).max() < 1e-9

        base = predict_member(bag, params)
        order = rng.permutation(n)
        shuffled_bag = EmbeddingBag(
            slide_id="s",
            anchors=tuple(anchors[i] for i in order),
            features=features[order],
        )
        shuffled = predict_member(shuffled_bag, params)
        assert shuffled.cancer_probability == base.cancer_probability  # bit-identical
        assert shuffled.gleason == base.gleason
        assert shuffled.attention.tobytes() == base.attention.tobytes()
    _passed("ABMIL formula oracle, attention sums, permutation invariance (1000 bags)")


# --- Gleason -> ISUP ------------------------------------------------------------

def test_gleason_to_isup_exhaustive():
    table = {
        (3, 3): 1, (3, 4): 2, (4, 3): 3,
        (4, 4): 4, (3, 5): 4, (5, 3): 4,
        (4, 5): 5, (5, 4): 5, (5, 5): 5,
        (BENIGN, BENIGN): BENIGN,
    }
    for pair, expected in table.items():
        assert gleason_to_isup(*pair) == expected
    _passed("Gleason->ISUP exhaustive (9 pattern pairs + benign)")


# --- tiling ---------------------------------------------------------------------

class _ProceduralPyramid(SlidePyramid):
    """Deterministic synthetic slide generated on demand (no full raster)."""

    def __init__(self, slide_id, width, height, um_per_px=1.0):
        super().__init__(slide_id, [PyramidLevel(width, height, um_per_px)])

    def read_region(self, level, x, y, w, h):
        ys = (np.arange(y, y + h, dtype=np.int64) * 31) % 211
        xs = (np.arange(x, x + w, dtype=np.int64) * 17) % 197
        base = (ys[:, None] + xs[None, :]) % 251
        return np.stack([base, (base * 3) % 251, (base * 7) % 251], axis=2).astype(np.uint8)


def test_tiling_oracle_and_archive_on_100_geometries(tmp_path):
    rng = np.random.default_rng(31)
    for trial in range(100):
        w = int(rng.integers(1, 2600))
        h = int(rng.integers(1, 2600))
        patch = int(rng.integers(1, 520))
        overlap = int(rng.integers(0, patch))
        plan = plan_grid((w, h), patch, overlap)
        xs = grid_axis_loop(w, patch, patch - overlap)
        ys = grid_axis_loop(h, patch, patch - overlap)
        assert plan.positions == tuple((x, y) for y in ys for x in xs)

    # extraction against the enumeration + fraction filter on random slides
    for trial in range(6):
        w = int(rng.integers(300, 800))
        h = int(rng.integers(300, 800))
        pyramid = _ProceduralPyramid(f"syn{trial}", w, h)
        mask = TissueMask(um_per_px=1.0, raster=rng.random((h, w)) < 0.15)
        path = tmp_path / f"a{trial}.ptar"
        extract(pyramid, mask, "prediction", path)
        header, records = read_archive(path)
        xs = grid_axis_loop(w, 256, 128)
        ys = grid_axis_loop(h, 256, 128)
        expected_anchors = []
        padded = np.zeros((max(h, 256), max(w, 256)), dtype=bool)
        padded[:h, :w] = mask.raster
        for y in ys:
            for x in xs:
                window = padded[y : y + 256, x : x + 256]
                if window.sum() / (256 * 256) >= 0.10:
                    expected_anchors.append((x, y))
        assert [r.anchor for r in records] == expected_anchors
        assert all(r.tissue_fraction >= 0.10 for r in records)

        # archive round-trip byte-identity
        copy = tmp_path / f"b{trial}.ptar"
        write_archive(copy, header.slide_id, header.patch_px, header.target_um_per_px, records)
        assert path.read_bytes() == copy.read_bytes()
    _passed("tiling enumeration oracle, 10% retention, archive round-trip")


def test_large_slide_extraction_under_five_minutes(tmp_path):
    size = 20_000
    pyramid = _ProceduralPyramid("large", size, size, um_per_px=1.0)
    mask_mpp = 8.0
    mask_dim = math.ceil(size / mask_mpp)
    yy, xx = np.mgrid[0:mask_dim, 0:mask_dim]
    # diagonal tissue band covering roughly 6% of the slide
    band = np.abs(yy - xx) < mask_dim * 0.03
    mask = TissueMask(um_per_px=mask_mpp, raster=band)
    path = tmp_path / "large.ptar"
    start = time.perf_counter()
    header = extract(pyramid, mask, "prediction", path)
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    assert header.record_count > 500
    count = 0
    _, records = iter_archive(path)
    for record in records:
        count += 1
        assert record.tissue_fraction >= 0.10
    assert count == header.record_count
    _passed(
        f"20000x20000 px slide extracted in {elapsed:.1f} s"
        f" ({header.record_count} patches, {path.stat().st_size / 1e6:.0f} MB)"
    )


# --- end-to-end demo -------------------------------------------------------------

def _tree(root):
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


def test_end_to_end_demo_deterministic(tmp_path):
    from ihctriage.demo import make_demo_cohort, run_demo_pipeline

    root = make_demo_cohort(tmp_path / "cohort", n_slides=50)
    out1 = run_demo_pipeline(root, tmp_path / "run1")
    out2 = run_demo_pipeline(root, tmp_path / "run2")
    files1 = _tree(out1)
    assert files1 == _tree(out2)
    assert len(files1) > 50 * 5
    differing = [
        str(rel)
        for rel in files1
        if not filecmp.cmp(out1 / rel, out2 / rel, shallow=False)
    ]
    assert differing == []

    # golden regression: the emitted sweep rows equal an independent
    # composition of the confusion/metrics oracles over the same inputs
    import json

    from oracles import confusion_loop

    from ihctriage.cohort import filter_ihc_basal, parse_manifest

    manifest = parse_manifest(root / "manifest.csv")
    included, ledger = filter_ihc_basal(manifest)
    summary = json.loads((out1 / "predictions" / "summary.json").read_text())
    prob = {p["slide_id"]: p["cancer_probability"] for p in summary["predictions"]}
    evaluable = [
        LabeledPrediction(
            slide_id=s.slide_id, truth=s.truth, cancer_probability=prob[s.slide_id],
            truth_isup=s.isup if s.truth == "malignant" else None,
        )
        for s in included
    ]
    rows = (out1 / "reports" / "sweep.csv").read_text().strip().split("\n")
    header_cols = rows[0].split(",")
    for line, threshold in zip(rows[1:], (0.5, 0.2, 0.1, 0.01)):
        row = dict(zip(header_cols, line.split(",")))
        tp, fp, tn, fn = confusion_loop(evaluable, threshold)
        assert (int(row["tp"]), int(row["fp"]), int(row["tn"]), int(row["fn"])) == (tp, fp, tn, fn)
        assert row["sensitivity"] == ratio_str(tp, tp + fn)
        assert row["specificity"] == ratio_str(tn, tn + fp)
        assert int(row["ihc_reduction_count"]) == tn + fn
        assert row["ihc_reduction_pct"] == percent_str(tn + fn, len(evaluable))

    # exclusions from the bundled cohort flow into the ledger
    assert ledger.stages[0][1] == 50
    assert ledger.included_count == len(evaluable) == 48
    _passed("end-to-end demo: deterministic regeneration + oracle-checked reports")
