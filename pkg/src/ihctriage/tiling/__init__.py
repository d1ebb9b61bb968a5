from .archive import (
    ArchiveHeader,
    PatchArchiveWriter,
    PatchRecord,
    iter_archive,
    read_archive,
    write_archive,
)
from .extract import (
    MIN_TISSUE_FRACTION,
    PREDICTION,
    PREDICTION_OVERLAP_PX,
    TRAINING,
    extract,
    extract_patch_pixels,
    plan_for_slide,
)
from .grid import WHITE_PAD, GridPlan, axis_anchors, plan_grid
from .mask import TissueMask, detect_tissue, expected_mask_shape, load_mask, save_mask, tissue_fraction
from .pyramid import PyramidLevel, RasterPyramid, SlidePyramid, load_pyramid
from .resample import LANCZOS_A, lanczos_kernel, resample_patch

__all__ = [
    "ArchiveHeader",
    "PatchArchiveWriter",
    "PatchRecord",
    "iter_archive",
    "read_archive",
    "write_archive",
    "MIN_TISSUE_FRACTION",
    "PREDICTION",
    "PREDICTION_OVERLAP_PX",
    "TRAINING",
    "extract",
    "extract_patch_pixels",
    "plan_for_slide",
    "WHITE_PAD",
    "GridPlan",
    "axis_anchors",
    "plan_grid",
    "TissueMask",
    "detect_tissue",
    "expected_mask_shape",
    "load_mask",
    "save_mask",
    "tissue_fraction",
    "PyramidLevel",
    "RasterPyramid",
    "SlidePyramid",
    "load_pyramid",
    "LANCZOS_A",
    "lanczos_kernel",
    "resample_patch",
]
