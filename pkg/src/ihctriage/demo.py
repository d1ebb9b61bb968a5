"""Bundled synthetic demo cohort and the end-to-end pipeline driver.

The cohort is procedurally generated from a fixed seed: small synthetic
slides with pink tissue blobs, a manifest with randomized labels, and a
random-but-fixed head-weight bundle. Slide pixels never carry diagnostic
meaning; the cohort exists so the full tile -> predict -> evaluate ->
report path runs deterministically at desk scale.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from .cohort import (
    CohortManifest,
    PatientRecord,
    SlideRecord,
    characteristics_csv,
    characteristics_json,
    characteristics_markdown,
    characteristics_table,
    filter_ihc_basal,
    labeled_predictions,
    parse_manifest,
    save_manifest,
)
from .metrics import DEFAULT_GRID, curve_points, roc_and_auc, select_operating_point, sweep
from .metrics.report import (
    curve_csv,
    curve_json,
    roc_csv,
    save_roc_figure,
    save_tradeoff_figure,
    sweep_csv,
    sweep_json,
)
from .mil import random_bundle, render_heatmap, run_ensemble, save_bundle, save_heatmap_png
from .mil.bundle import load_bundle
from .mil.embeddings import bag_from_archive, save_bag
from .mil.ensemble import prediction_summary, prediction_to_json
from .predictions import load_predictions, probabilities, save_summary
from .tiling import RasterPyramid, detect_tissue, extract, load_pyramid, resample_patch, save_mask
from .tiling.mask import expected_mask_shape

DEMO_SEED = 20_240_601
FEATURE_DIM = 32
ATTENTION_DIM = 16
MASK_UM_PER_PX = 4.0
TARGET_UM_PER_PX = 1.0
PATCH_PX = 256
_TISSUE_RGB = np.array([222, 128, 166])
_GLEASON_FOR_ISUP = {1: (3, 3), 2: (3, 4), 3: (4, 3), 4: (4, 4), 5: (4, 5)}
_STAINS = ["HMWCK", "p63 + P504S/AMACR", "CK903/34 β E12", "p63"]


def _synthetic_slide(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    raster = np.full((height, width, 3), 255, dtype=np.uint8)
    yy, xx = np.mgrid[0:height, 0:width]
    n_blobs = int(rng.integers(2, 5))
    tissue = np.zeros((height, width), dtype=bool)
    for _ in range(n_blobs):
        cx = rng.uniform(0.2, 0.8) * width
        cy = rng.uniform(0.2, 0.8) * height
        rx = rng.uniform(0.12, 0.3) * width
        ry = rng.uniform(0.12, 0.3) * height
        tissue |= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    noise = rng.integers(-18, 19, (height, width, 3))
    colored = np.clip(_TISSUE_RGB[None, None, :] + noise, 60, 242).astype(np.uint8)
    raster[tissue] = colored[tissue]
    return raster


def make_demo_cohort(root, n_slides: int = 60, seed: int = DEMO_SEED) -> Path:
    """Write slides/, manifest.csv, and heads.zip under `root`."""
    root = Path(root)
    (root / "slides").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    patients = []
    for i in range(max(2, n_slides // 2)):
        psa_draw = rng.random()
        psa = (
            "elevated"
            if psa_draw < 0.05
            else None
            if psa_draw < 0.15
            else float(np.round(rng.uniform(0.5, 25.0), 1))
        )
        patients.append(
            PatientRecord(
                patient_id=f"demo-pt{i:03d}",
                age_years=int(rng.integers(42, 88)),
                psa_ng_ml=psa,
            )
        )

    slides = []
    sizes = {}
    for i in range(n_slides):
        slide_id = f"demo-{i:03d}"
        width = int(rng.integers(576, 833))
        height = int(rng.integers(576, 833))
        raster = _synthetic_slide(rng, width, height)
        Image.fromarray(raster).save(root / "slides" / f"{slide_id}.png", format="PNG")
        sizes[slide_id] = (width, height)

        malignant = bool(rng.random() < 0.55)
        if malignant:
            isup = int(rng.integers(1, 6))
            gleason = _GLEASON_FOR_ISUP[isup]
            length = float(np.round(rng.uniform(0.3, 18.0), 1))
        else:
            isup = gleason = length = None
        if i == n_slides - 1:
            ihc, stain = False, None  # exercises the CONSORT exclusion path
        elif i == n_slides - 2:
            ihc, stain = True, "PSA"
        else:
            ihc, stain = True, _STAINS[i % len(_STAINS)]
        slides.append(
            SlideRecord(
                slide_id=slide_id,
                patient_id=patients[i % len(patients)].patient_id,
                cohort_id="DEMO",
                truth="malignant" if malignant else "benign",
                isup=isup,
                gleason=gleason,
                cancer_length_mm=length,
                ihc_requested=ihc,
                stain_type=stain,
                label_level="slide",
            )
        )

    manifest = CohortManifest(
        cohort_id="DEMO",
        dataset_type="internal",
        scanner_model="synthetic",
        pathologist_count=None,
        slides=tuple(slides),
        patients=tuple(patients),
    )
    save_manifest(manifest, root / "manifest.csv")
    save_bundle(random_bundle(FEATURE_DIM, ATTENTION_DIM, seed + 1), root / "heads.zip")
    (root / "cohort.json").write_text(
        json.dumps({"sizes": sizes, "seed": seed, "n_slides": n_slides}, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    return root


def auto_mask(pyramid: RasterPyramid, mask_um_per_px: float = MASK_UM_PER_PX):
    """Thumbnail the slide to mask resolution and run the tissue heuristic."""
    base = pyramid.levels[0]
    rows, cols = expected_mask_shape(
        (base.width_px, base.height_px), base.um_per_px, mask_um_per_px
    )
    factor = mask_um_per_px / base.um_per_px
    full = pyramid.read_region(0, 0, 0, base.width_px, base.height_px)
    thumb = resample_patch(full, factor, (cols, rows))
    mask = detect_tissue(thumb, um_per_px=mask_um_per_px, slide_id=pyramid.slide_id)
    return mask


def run_demo_pipeline(root, out_dir) -> Path:
    """tile -> predict -> evaluate -> report over a generated demo cohort."""
    root = Path(root)
    out = Path(out_dir)
    for sub in ("masks", "archives", "bags", "predictions", "heatmaps", "reports"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    manifest = parse_manifest(root / "manifest.csv")
    bundle = load_bundle(root / "heads.zip")
    sizes = json.loads((root / "cohort.json").read_text(encoding="utf-8"))["sizes"]

    predictions = {}
    for slide in manifest.slides:
        pyramid = load_pyramid(
            root / "slides" / f"{slide.slide_id}.png", slide_mpp=TARGET_UM_PER_PX
        )
        mask = auto_mask(pyramid)
        save_mask(mask, out / "masks" / f"{slide.slide_id}.png")
        archive_path = out / "archives" / f"{slide.slide_id}.ptar"
        extract(
            pyramid,
            mask,
            "prediction",
            archive_path,
            patch_px=PATCH_PX,
            target_um_per_px=TARGET_UM_PER_PX,
        )
        bag = bag_from_archive(archive_path, FEATURE_DIM)
        save_bag(bag, out / "bags" / f"{slide.slide_id}.json")
        prediction = run_ensemble(bag, bundle)
        (out / "predictions" / f"{slide.slide_id}.json").write_text(
            prediction_to_json(prediction), encoding="utf-8"
        )
        extent = sizes[slide.slide_id]
        raster = render_heatmap(prediction.mean_attention, prediction.anchors, PATCH_PX, extent)
        save_heatmap_png(raster, out / "heatmaps" / f"{slide.slide_id}.png")
        predictions[slide.slide_id] = prediction_summary(prediction)

    save_summary(predictions, out / "predictions" / "summary.json")
    write_evaluation(manifest, out / "predictions", out / "reports")
    return out


def write_evaluation(manifest: CohortManifest, preds_path, report_dir, grid=DEFAULT_GRID) -> None:
    """Join predictions with the manifest and emit tables, curves, figures."""
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    predictions = load_predictions(preds_path)
    included, ledger = filter_ihc_basal(manifest)
    evaluable = CohortManifest(
        cohort_id=manifest.cohort_id,
        dataset_type=manifest.dataset_type,
        scanner_model=manifest.scanner_model,
        pathologist_count=manifest.pathologist_count,
        slides=tuple(included),
        patients=manifest.patients,
    )
    preds = labeled_predictions(evaluable, probabilities(predictions))
    reports = sweep(preds, list(grid))
    curve = roc_and_auc(preds)
    points = curve_points(preds, 0.01)
    selected = select_operating_point(preds, 1.0, list(grid))

    (report_dir / "sweep.csv").write_text(sweep_csv(reports), encoding="utf-8")
    (report_dir / "sweep.json").write_text(
        sweep_json(reports, cohort_id=manifest.cohort_id, auc=curve.auc), encoding="utf-8"
    )
    (report_dir / "curve.csv").write_text(curve_csv(points), encoding="utf-8")
    (report_dir / "curve.json").write_text(curve_json(points), encoding="utf-8")
    (report_dir / "roc.csv").write_text(roc_csv(curve), encoding="utf-8")
    save_tradeoff_figure(points, report_dir / "tradeoff.png", title=manifest.cohort_id)
    save_roc_figure(curve, report_dir / "roc.png", title=manifest.cohort_id)

    table = characteristics_table(manifest)
    (report_dir / "characteristics.md").write_text(characteristics_markdown(table), encoding="utf-8")
    (report_dir / "characteristics.csv").write_text(characteristics_csv(table), encoding="utf-8")
    (report_dir / "characteristics.json").write_text(characteristics_json(table), encoding="utf-8")
    (report_dir / "inclusion.json").write_text(
        json.dumps(ledger.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (report_dir / "calibration.json").write_text(
        json.dumps(
            {
                "target_sensitivity": 1.0,
                "threshold": selected.threshold,
                "target_met": selected.target_met,
                "achieved_sensitivity": selected.achieved_sensitivity,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
