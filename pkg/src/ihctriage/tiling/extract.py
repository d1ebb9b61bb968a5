"""Patch extraction: pyramid + tissue mask -> patch archive.

Training mode tiles without overlap; prediction mode uses a 128 px overlap.
Only windows whose tissue fraction is at least 10% are kept, in row-major
anchor order, so the archive is reproducible regardless of how callers
parallelize upstream work.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidInputError
from .archive import ArchiveHeader, PatchArchiveWriter
from .grid import WHITE_PAD, GridPlan, plan_grid
from .mask import TissueMask, expected_mask_shape, tissue_fraction
from .pyramid import SlidePyramid
from .resample import LANCZOS_A, resample_patch

TRAINING = "training"
PREDICTION = "prediction"
PREDICTION_OVERLAP_PX = 128
MIN_TISSUE_FRACTION = 0.10
_WHITE = 255


def overlap_for_mode(mode: str, patch_px: int) -> int:
    if mode == TRAINING:
        return 0
    if mode == PREDICTION:
        if PREDICTION_OVERLAP_PX >= patch_px:
            raise InvalidInputError(
                f"patch_px {patch_px} too small for the {PREDICTION_OVERLAP_PX} px overlap"
            )
        return PREDICTION_OVERLAP_PX
    raise InvalidInputError(f"mode must be training or prediction, got {mode!r}")


def _read_window_white_padded(pyramid, level, x0, y0, w, h):
    """Level window clipped to bounds, missing area filled white."""
    lw, lh = pyramid.levels[level].width_px, pyramid.levels[level].height_px
    rx0, ry0 = max(x0, 0), max(y0, 0)
    rx1, ry1 = min(x0 + w, lw), min(y0 + h, lh)
    out = np.full((h, w, 3), _WHITE, dtype=np.uint8)
    if rx1 > rx0 and ry1 > ry0:
        region = pyramid.read_region(level, rx0, ry0, rx1 - rx0, ry1 - ry0)
        out[ry0 - y0 : ry1 - y0, rx0 - x0 : rx1 - x0] = region
    return out


def extract_patch_pixels(pyramid: SlidePyramid, anchor, patch_px: int, target_um_per_px: float) -> bytes:
    """Pixels of one patch at target resolution, white-padded past the slide."""
    level_idx = pyramid.source_level_for(target_um_per_px)
    level = pyramid.levels[level_idx]
    factor = target_um_per_px / level.um_per_px
    if abs(factor - 1.0) <= 1e-9:
        window = _read_window_white_padded(pyramid, level_idx, anchor[0], anchor[1], patch_px, patch_px)
        return window.tobytes()
    src_x = anchor[0] * factor
    src_y = anchor[1] * factor
    margin = LANCZOS_A * factor + 1
    x0 = math.floor(src_x - margin)
    y0 = math.floor(src_y - margin)
    x1 = math.ceil(src_x + patch_px * factor + margin)
    y1 = math.ceil(src_y + patch_px * factor + margin)
    window = _read_window_white_padded(pyramid, level_idx, x0, y0, x1 - x0, y1 - y0)
    resampled = resample_patch(
        window, factor, (patch_px, patch_px), offset=(src_x - x0, src_y - y0)
    )
    return resampled.tobytes()


def plan_for_slide(
    pyramid: SlidePyramid, mode: str, patch_px: int, target_um_per_px: float
) -> GridPlan:
    extent = pyramid.extent_at(target_um_per_px)
    overlap = overlap_for_mode(mode, patch_px)
    return plan_grid(extent, patch_px, overlap, WHITE_PAD, target_um_per_px)


def _validate_mask(mask: TissueMask, pyramid: SlidePyramid, target_um_per_px: float) -> None:
    if mask.um_per_px < target_um_per_px - 1e-9:
        raise InvalidInputError(
            f"mask at {mask.um_per_px} um/px is finer than the target {target_um_per_px}"
        )
    base = pyramid.levels[0]
    expected = expected_mask_shape((base.width_px, base.height_px), base.um_per_px, mask.um_per_px)
    if mask.shape != expected:
        raise InvalidInputError(
            f"mask raster {mask.shape} does not match the slide extent {expected} at mask resolution"
        )


def extract(
    pyramid: SlidePyramid,
    mask: TissueMask,
    mode: str,
    out_path,
    patch_px: int = 256,
    target_um_per_px: float = 1.0,
    min_tissue_fraction: float = MIN_TISSUE_FRACTION,
) -> ArchiveHeader:
    """Tile a slide into a patch archive at out_path; returns the header."""
    pyramid.source_level_for(target_um_per_px)  # raises UnsupportedSlideError early
    _validate_mask(mask, pyramid, target_um_per_px)
    plan = plan_for_slide(pyramid, mode, patch_px, target_um_per_px)
    writer = PatchArchiveWriter(out_path, pyramid.slide_id, patch_px, target_um_per_px)
    try:
        for anchor in plan.positions:
            fraction = tissue_fraction(
                mask, (anchor[0], anchor[1], patch_px, patch_px), target_um_per_px
            )
            if fraction >= min_tissue_fraction:
                pixels = extract_patch_pixels(pyramid, anchor, patch_px, target_um_per_px)
                writer.append(anchor, fraction, pixels)
    except Exception:
        writer._fh.close()
        raise
    return writer.close()
