"""Attention heatmaps: overlap-averaged tile attention rendered to a raster."""

from __future__ import annotations

import numpy as np
from PIL import Image

from ..errors import InvalidInputError


def render_heatmap(attention, anchors, patch_px: int, extent_px) -> np.ndarray:
    """Rasterize per-tile attention at target resolution.

    Each covered pixel gets the mean attention of all tiles covering it;
    uncovered pixels are 0. The raster is normalized to [0, 1] by its
    maximum when the maximum is positive. Tile footprints are clipped to
    the extent.
    """
    width, height = int(extent_px[0]), int(extent_px[1])
    if width <= 0 or height <= 0:
        raise InvalidInputError(f"extent must be positive, got {extent_px!r}")
    attention = np.asarray(attention, dtype=np.float64)
    if len(anchors) != attention.shape[0]:
        raise InvalidInputError("anchor count does not match attention length")
    total = np.zeros((height, width), dtype=np.float64)
    cover = np.zeros((height, width), dtype=np.int32)
    for (x, y), value in zip(anchors, attention):
        x0, y0 = int(x), int(y)
        x1, y1 = min(x0 + patch_px, width), min(y0 + patch_px, height)
        if x0 < 0 or y0 < 0 or x0 >= width or y0 >= height:
            raise InvalidInputError(f"anchor {(x, y)} outside extent {extent_px}")
        total[y0:y1, x0:x1] += value
        cover[y0:y1, x0:x1] += 1
    raster = np.zeros_like(total)
    covered = cover > 0
    raster[covered] = total[covered] / cover[covered]
    peak = raster.max()
    if peak > 0:
        raster /= peak
    return raster


def save_heatmap_png(raster: np.ndarray, path) -> None:
    """8-bit grayscale PNG aligned to slide coordinates at target resolution."""
    data = np.clip(np.rint(np.asarray(raster, dtype=np.float64) * 255.0), 0, 255)
    Image.fromarray(data.astype(np.uint8), mode="L").save(path, format="PNG")


def load_heatmap_png(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.float64) / 255.0
