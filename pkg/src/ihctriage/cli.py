"""Command-line interface: tile, predict, evaluate, calibrate, report, serve, demo."""

from __future__ import annotations

import json
from pathlib import Path

import click

from .errors import TriageError

OUT_ENVVAR = "IHCTRIAGE_OUT"


@click.group()
@click.version_option(package_name="ihctriage")
def main():
    """Decision-support toolkit for IHC triage of prostate biopsy slides."""


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


@main.command()
@click.option("--slide", required=True, type=click.Path(path_type=Path), help="Slide image or pyramid manifest (.json).")
@click.option("--slide-mpp", type=float, default=None, help="um/px of a raw raster slide (ignored for pyramid manifests).")
@click.option("--mask", "mask_path", default="auto", help="Tissue mask PNG (with sidecar) or 'auto' for the built-in heuristic.")
@click.option("--mask-mpp", type=float, default=4.0, show_default=True, help="Resolution for auto-generated masks.")
@click.option("--mode", type=click.Choice(["training", "prediction"]), default="prediction", show_default=True)
@click.option("--patch", "patch_px", type=int, default=256, show_default=True)
@click.option("--mpp", "target_um_per_px", type=float, default=1.0, show_default=True, help="Target patch resolution in um/px.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="Output patch archive.")
def tile(slide, slide_mpp, mask_path, mask_mpp, mode, patch_px, target_um_per_px, out_path):
    """Tile a slide into a patch archive."""
    from .demo import auto_mask
    from .tiling import extract, load_mask, load_pyramid

    try:
        pyramid = load_pyramid(slide, slide_mpp=slide_mpp)
        if mask_path == "auto":
            mask = auto_mask(pyramid, mask_um_per_px=mask_mpp)
        else:
            mask = load_mask(Path(mask_path))
        header = extract(
            pyramid, mask, mode, out_path, patch_px=patch_px, target_um_per_px=target_um_per_px
        )
    except (TriageError, OSError) as exc:
        _fail(exc)
    click.echo(f"{header.slide_id}: {header.record_count} patches -> {out_path}")


@main.command()
@click.option("--archive", type=click.Path(path_type=Path), default=None, help="Patch archive to featurize with the demo encoder.")
@click.option("--bag", "bag_paths", multiple=True, type=click.Path(path_type=Path), help="Embedding bag JSON; repeat 3x for one bag per TTA pass.")
@click.option("--bundle", "bundle_path", required=True, type=click.Path(path_type=Path), help="Head-weight bundle (.zip).")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="Prediction JSON output.")
@click.option("--heatmap", "heatmap_path", type=click.Path(path_type=Path), default=None, help="Also write the mean-attention heatmap PNG.")
@click.option("--extent", default=None, help="Slide extent WxH at target resolution for the heatmap.")
def predict(archive, bag_paths, bundle_path, out_path, heatmap_path, extent):
    """Run the 30-member ensemble over a slide's embeddings."""
    from .mil import render_heatmap, run_ensemble, save_heatmap_png
    from .mil.bundle import load_bundle
    from .mil.embeddings import bag_from_archive, load_bag
    from .mil.ensemble import MEMBER_IDS, prediction_to_json

    try:
        bundle = load_bundle(bundle_path)
        feature_dim = bundle[MEMBER_IDS[0]].feature_dim
        if archive is not None:
            bags = bag_from_archive(archive, feature_dim)
        elif len(bag_paths) == 1:
            bags = load_bag(bag_paths[0])
        elif len(bag_paths) == 3:
            per_tta = [load_bag(p) for p in bag_paths]
            bags = {mid: per_tta[mid[1]] for mid in MEMBER_IDS}
        elif bag_paths:
            raise TriageError("pass one bag, or exactly three (one per TTA pass)")
        else:
            raise TriageError("either --archive or --bag is required")
        prediction = run_ensemble(bags, bundle)
        Path(out_path).write_text(prediction_to_json(prediction), encoding="utf-8")
        if heatmap_path is not None:
            if extent:
                width, height = (int(v) for v in str(extent).lower().split("x"))
            else:
                width = max(x for x, _ in prediction.anchors) + 256
                height = max(y for _, y in prediction.anchors) + 256
            patch_px = 256
            raster = render_heatmap(
                prediction.mean_attention, prediction.anchors, patch_px, (width, height)
            )
            save_heatmap_png(raster, heatmap_path)
    except (TriageError, OSError) as exc:
        _fail(exc)
    click.echo(
        f"{prediction.slide_id}: {prediction.final_gleason} "
        f"(p={prediction.cancer_probability:.4f}) -> {out_path}"
    )


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise click.ClickException(f"not a threshold list: {text!r}") from None


@main.command()
@click.option("--preds", "preds_path", required=True, type=click.Path(path_type=Path), help="Prediction JSON file or directory.")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--thresholds", default="0.5,0.2,0.1,0.01", show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), envvar=OUT_ENVVAR, default="reports", show_default=True)
def evaluate(preds_path, manifest_path, thresholds, out_dir):
    """Operating-point tables, ROC/trade-off curves, and figures."""
    from .cohort import parse_manifest
    from .demo import write_evaluation

    try:
        manifest = parse_manifest(manifest_path)
        write_evaluation(manifest, preds_path, out_dir, grid=_parse_grid(thresholds))
    except (TriageError, OSError) as exc:
        _fail(exc)
    click.echo(f"evaluation written to {out_dir}")


@main.command()
@click.option("--preds", "preds_path", required=True, type=click.Path(path_type=Path))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--target-sensitivity", type=float, default=1.0, show_default=True)
@click.option("--grid", default="0.5,0.2,0.1,0.01", show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None, help="Optional JSON output.")
def calibrate(preds_path, manifest_path, target_sensitivity, grid, out_path):
    """Pick the sensitivity-prioritized operating point on a calibration cohort."""
    from .cohort import filter_ihc_basal, labeled_predictions, parse_manifest
    from .metrics import select_operating_point
    from .predictions import load_predictions, probabilities

    try:
        manifest = parse_manifest(manifest_path)
        included, _ = filter_ihc_basal(manifest)
        evaluable = manifest.__class__(
            cohort_id=manifest.cohort_id,
            dataset_type=manifest.dataset_type,
            scanner_model=manifest.scanner_model,
            pathologist_count=manifest.pathologist_count,
            slides=tuple(included),
            patients=manifest.patients,
        )
        preds = labeled_predictions(evaluable, probabilities(load_predictions(preds_path)))
        selected = select_operating_point(preds, target_sensitivity, _parse_grid(grid))
    except (TriageError, OSError) as exc:
        _fail(exc)
    payload = {
        "threshold": selected.threshold,
        "target_sensitivity": target_sensitivity,
        "target_met": selected.target_met,
        "achieved_sensitivity": selected.achieved_sensitivity,
    }
    if out_path:
        Path(out_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(json.dumps(payload))
    if not selected.target_met:
        click.echo("warning: target sensitivity unmet on the calibration grid", err=True)


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["md", "csv", "json"]), default=None, help="Defaults to the output extension.")
@click.option("--inclusion", "inclusion_path", type=click.Path(path_type=Path), default=None, help="Also write the CONSORT-style inclusion ledger JSON.")
def report(manifest_path, out_path, fmt, inclusion_path):
    """Cohort characteristics table (markdown, CSV, or JSON)."""
    from .cohort import (
        characteristics_csv,
        characteristics_json,
        characteristics_markdown,
        characteristics_table,
        filter_ihc_basal,
        parse_manifest,
    )

    try:
        manifest = parse_manifest(manifest_path)
    except TriageError as exc:
        _fail(exc)
    table = characteristics_table(manifest)
    fmt = fmt or {"": "md", ".md": "md", ".csv": "csv", ".json": "json"}.get(
        Path(out_path).suffix.lower(), "md"
    )
    renderer = {
        "md": characteristics_markdown,
        "csv": characteristics_csv,
        "json": characteristics_json,
    }[fmt]
    Path(out_path).write_text(renderer(table), encoding="utf-8")
    if inclusion_path:
        _, ledger = filter_ihc_basal(manifest)
        Path(inclusion_path).write_text(
            json.dumps(ledger.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    click.echo(f"characteristics ({fmt}) -> {out_path}")


@main.command()
@click.option("--preds", "preds_path", required=True, type=click.Path(path_type=Path))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--heatmaps", "heatmap_dir", type=click.Path(path_type=Path), default=None)
@click.option("--threshold", type=float, default=0.01, show_default=True)
@click.option("--journal", "journal_path", type=click.Path(path_type=Path), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(preds_path, manifest_path, heatmap_dir, threshold, journal_path, host, port):
    """Serve recommendations and review sessions over HTTP."""
    import uvicorn

    try:
        app = build_service_app(preds_path, manifest_path, heatmap_dir, threshold, journal_path)
    except (TriageError, OSError) as exc:
        _fail(exc)
    uvicorn.run(app, host=host, port=port)


def build_service_app(preds_path, manifest_path, heatmap_dir=None, threshold=0.01, journal_path=None):
    """Wire a ReviewService from prediction + manifest files (used by serve)."""
    from .cohort import labeled_predictions, parse_manifest
    from .metrics import DEFAULT_GRID, curve_points, roc_and_auc, sweep
    from .metrics.report import sweep_json
    from .predictions import load_predictions, probabilities
    from .review import ReviewService, SlideInfo
    from .review.api import create_app

    manifest = parse_manifest(manifest_path)
    predictions = load_predictions(preds_path)
    service = ReviewService(operating_threshold=threshold, journal_path=journal_path)
    for slide in manifest.slides:
        entry = predictions.get(slide.slide_id)
        if entry is None:
            continue
        heatmap_path = None
        if heatmap_dir is not None:
            candidate = Path(heatmap_dir) / f"{slide.slide_id}.png"
            heatmap_path = str(candidate) if candidate.exists() else None
        service.register_slide(
            SlideInfo(
                slide_id=slide.slide_id,
                cancer_probability=entry["cancer_probability"],
                final_isup=entry.get("final_isup"),
                final_gleason=entry.get("final_gleason"),
                heatmap_path=heatmap_path,
                image_ref=f"/images/{slide.slide_id}.png",
                reference_class=slide.reference_class(),
                cohort_id=manifest.cohort_id,
            )
        )
    scored = [s for s in manifest.slides if s.slide_id in predictions]
    if scored:
        evaluable = manifest.__class__(
            cohort_id=manifest.cohort_id,
            dataset_type=manifest.dataset_type,
            scanner_model=manifest.scanner_model,
            pathologist_count=manifest.pathologist_count,
            slides=tuple(scored),
            patients=manifest.patients,
        )
        preds = labeled_predictions(evaluable, probabilities(predictions))
        reports = sweep(preds, list(DEFAULT_GRID))
        payload = json.loads(sweep_json(reports, cohort_id=manifest.cohort_id, auc=None))
        try:
            roc = roc_and_auc(preds)
            payload["auc"] = roc.auc
            payload["roc"] = [[fpr, tpr] for fpr, tpr in roc.points]
        except TriageError:
            payload["roc"] = []
        payload["curve"] = [
            {"threshold": p.threshold, "sensitivity": p.sensitivity, "specificity": p.specificity}
            for p in curve_points(preds, 0.01)
        ]
        service.set_cohort_report(manifest.cohort_id, payload)
    return create_app(service)


@main.command()
@click.option("--out", "out_dir", type=click.Path(path_type=Path), envvar=OUT_ENVVAR, default="demo-cohort", show_default=True)
@click.option("--slides", "n_slides", type=int, default=60, show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to the bundled fixed seed.")
@click.option("--run/--no-run", default=True, show_default=True, help="Also run the full pipeline after generating.")
def demo(out_dir, n_slides, seed, run):
    """Generate the synthetic demo cohort and run the end-to-end pipeline."""
    from .demo import DEMO_SEED, make_demo_cohort, run_demo_pipeline

    try:
        root = make_demo_cohort(out_dir, n_slides=n_slides, seed=DEMO_SEED if seed is None else seed)
        click.echo(f"demo cohort ({n_slides} slides) -> {root}")
        if run:
            out = run_demo_pipeline(root, Path(out_dir) / "out")
            click.echo(f"pipeline outputs -> {out}")
    except (TriageError, OSError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
