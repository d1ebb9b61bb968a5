"""Binary tissue masks: detection heuristic, window fractions, PNG round-trip.

Externally produced masks are first-class inputs (imported as a 1-bit PNG
with a small JSON sidecar). The built-in detector is a deterministic
stand-in heuristic, not a trained segmenter: a pixel is tissue iff its HSV
saturation is >= 0.07 and its value is <= 0.95.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import InvalidInputError

SATURATION_MIN = 0.07
VALUE_MAX = 0.95


@dataclass(frozen=True)
class TissueMask:
    um_per_px: float
    raster: np.ndarray  # bool, shape (rows, cols) = (y, x)
    slide_id: str = ""

    def __post_init__(self):
        raster = np.asarray(self.raster, dtype=bool)
        if raster.ndim != 2:
            raise InvalidInputError("mask raster must be 2-D")
        raster.setflags(write=False)
        object.__setattr__(self, "raster", raster)
        if not self.um_per_px > 0:
            raise InvalidInputError(f"um_per_px must be positive, got {self.um_per_px}")

    @property
    def shape(self):
        return self.raster.shape


def expected_mask_shape(slide_extent_px, slide_um_per_px: float, mask_um_per_px: float):
    """(rows, cols) a mask must have to cover the slide extent, rounded up."""
    width_px, height_px = slide_extent_px
    scale = slide_um_per_px / mask_um_per_px
    return (math.ceil(height_px * scale), math.ceil(width_px * scale))


def detect_tissue(
    thumbnail: np.ndarray,
    um_per_px: float,
    slide_id: str = "",
    saturation_min: float = SATURATION_MIN,
    value_max: float = VALUE_MAX,
) -> TissueMask:
    """Heuristic tissue detection on an RGB thumbnail at mask resolution."""
    rgb = np.asarray(thumbnail, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.size == 0:
        raise InvalidInputError("thumbnail must be a non-empty (h, w, 3) RGB raster")
    scaled = rgb.astype(np.float64) / 255.0
    mx = scaled.max(axis=2)
    mn = scaled.min(axis=2)
    saturation = np.zeros_like(mx)
    nonzero = mx > 0
    saturation[nonzero] = (mx[nonzero] - mn[nonzero]) / mx[nonzero]
    tissue = (saturation >= saturation_min) & (mx <= value_max)
    return TissueMask(um_per_px=um_per_px, raster=tissue, slide_id=slide_id)


def tissue_fraction(mask: TissueMask, window, window_um_per_px: float) -> float:
    """Tissue share of a window given at target resolution.

    Each target pixel is looked up in the mask by nearest neighbor; pixels
    that fall outside the mask raster (padding beyond the slide) count as
    non-tissue. The denominator is the full window area in target pixels.
    """
    x, y, w, h = (int(v) for v in window)
    if w <= 0 or h <= 0:
        raise InvalidInputError(f"window must have positive size, got {window!r}")
    scale = window_um_per_px / mask.um_per_px
    if scale > 1 + 1e-9:
        raise InvalidInputError("mask resolution must be coarser than or equal to the window's")
    rows, cols = mask.shape

    def axis_weights(start, count, limit):
        # how many target pixels land on each mask index (nearest neighbor)
        idx = np.floor((np.arange(start, start + count) + 0.5) * scale).astype(np.int64)
        idx = idx[(idx >= 0) & (idx < limit)]
        if idx.size == 0:
            return None, 0
        lo = int(idx[0])
        weights = np.bincount(idx - lo, minlength=int(idx[-1]) + 1 - lo)
        return weights.astype(np.float64), lo

    wx, x_lo = axis_weights(x, w, cols)
    wy, y_lo = axis_weights(y, h, rows)
    if wx is None or wy is None:
        return 0.0
    sub = mask.raster[y_lo : y_lo + wy.size, x_lo : x_lo + wx.size].astype(np.float64)
    tissue = wy @ sub @ wx
    return float(tissue / (w * h))


def save_mask(mask: TissueMask, png_path) -> None:
    """1-bit PNG plus a JSON sidecar carrying resolution and slide id."""
    png_path = Path(png_path)
    img = Image.fromarray(np.asarray(mask.raster, dtype=np.uint8) * 255).convert("1")
    img.save(png_path, format="PNG")
    sidecar = {"um_per_px": mask.um_per_px, "slide_id": mask.slide_id}
    with open(png_path.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_mask(png_path) -> TissueMask:
    png_path = Path(png_path)
    sidecar_path = png_path.with_suffix(".json")
    if not sidecar_path.exists():
        raise InvalidInputError(f"mask sidecar not found: {sidecar_path}")
    with open(sidecar_path, encoding="utf-8") as fh:
        sidecar = json.load(fh)
    with Image.open(png_path) as img:
        raster = np.asarray(img.convert("1"), dtype=bool)
    return TissueMask(
        um_per_px=float(sidecar["um_per_px"]),
        raster=raster,
        slide_id=sidecar.get("slide_id", ""),
    )
