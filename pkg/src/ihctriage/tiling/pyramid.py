"""Slide pyramids: multi-resolution access to whole-slide rasters.

A pyramid exposes ordered levels (finest first) and a region accessor.
Two concrete sources are supported at desk scale: a plain raster image
treated as a single-level pyramid, and a JSON manifest listing one image
file per level:

  {"slide_id": ..., "levels": [{"path": "level0.png", "um_per_px": 0.5}, ...]}
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import InvalidInputError, UnsupportedSlideError

_MPP_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PyramidLevel:
    width_px: int
    height_px: int
    um_per_px: float


class SlidePyramid(ABC):
    """Ordered resolution levels plus a (level, x, y, w, h) -> RGB accessor."""

    def __init__(self, slide_id: str, levels):
        levels = tuple(levels)
        if not levels:
            raise InvalidInputError("pyramid needs at least one level")
        for a, b in zip(levels, levels[1:]):
            if not b.um_per_px > a.um_per_px:
                raise InvalidInputError("levels must be strictly ordered by increasing um_per_px")
        base_w = levels[0].width_px * levels[0].um_per_px
        base_h = levels[0].height_px * levels[0].um_per_px
        for level in levels:
            if abs(level.width_px * level.um_per_px - base_w) > 0.01 * base_w:
                raise InvalidInputError("level physical width disagrees with level 0 by >1%")
            if abs(level.height_px * level.um_per_px - base_h) > 0.01 * base_h:
                raise InvalidInputError("level physical height disagrees with level 0 by >1%")
        self.slide_id = slide_id
        self.levels = levels

    @abstractmethod
    def read_region(self, level: int, x: int, y: int, w: int, h: int) -> np.ndarray:
        """Return the (h, w, 3) uint8 RGB raster of the requested window."""

    def extent_um(self) -> tuple[float, float]:
        base = self.levels[0]
        return (base.width_px * base.um_per_px, base.height_px * base.um_per_px)

    def extent_at(self, um_per_px: float) -> tuple[int, int]:
        """Pixel extent of the slide rendered at the given resolution."""
        w_um, h_um = self.extent_um()
        return (int(round(w_um / um_per_px)), int(round(h_um / um_per_px)))

    def source_level_for(self, target_um_per_px: float) -> int:
        """Nearest level at least as fine as the target resolution."""
        best = None
        for i, level in enumerate(self.levels):
            if level.um_per_px <= target_um_per_px * (1 + _MPP_TOLERANCE):
                best = i  # levels are ordered fine -> coarse; keep the coarsest match
        if best is None:
            raise UnsupportedSlideError(
                f"slide {self.slide_id} has no level at or below {target_um_per_px} um/px"
            )
        return best


class RasterPyramid(SlidePyramid):
    """Pyramid backed by in-memory numpy arrays (one per level)."""

    def __init__(self, slide_id: str, rasters_with_mpp):
        rasters = []
        levels = []
        for raster, mpp in rasters_with_mpp:
            raster = np.asarray(raster, dtype=np.uint8)
            if raster.ndim != 3 or raster.shape[2] != 3:
                raise InvalidInputError("each level raster must be (h, w, 3) RGB")
            rasters.append(raster)
            levels.append(PyramidLevel(raster.shape[1], raster.shape[0], float(mpp)))
        super().__init__(slide_id, levels)
        self._rasters = rasters

    def read_region(self, level, x, y, w, h):
        raster = self._rasters[level]
        if x < 0 or y < 0 or x + w > raster.shape[1] or y + h > raster.shape[0]:
            raise InvalidInputError(f"region {(x, y, w, h)} outside level {level}")
        return raster[y : y + h, x : x + w].copy()


def load_pyramid(path, slide_mpp: float | None = None, slide_id: str | None = None) -> SlidePyramid:
    """Load a pyramid manifest (.json) or a single raster at `slide_mpp`."""
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"slide not found: {path}")
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        rasters = []
        for entry in manifest["levels"]:
            img_path = path.parent / entry["path"]
            with Image.open(img_path) as img:
                rasters.append((np.asarray(img.convert("RGB")), float(entry["um_per_px"])))
        return RasterPyramid(slide_id or manifest["slide_id"], rasters)
    if slide_mpp is None:
        raise InvalidInputError("a raw raster slide needs an explicit um_per_px")
    with Image.open(path) as img:
        raster = np.asarray(img.convert("RGB"))
    return RasterPyramid(slide_id or path.stem, [(raster, float(slide_mpp))])
