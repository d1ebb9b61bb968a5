"""Patch grid geometry.

Anchors step by stride = patch - overlap. When the last stride position
does not land flush on the edge, one extra anchor at dim - patch is
appended so no edge tissue is dropped; when a dimension is smaller than
the patch, a single anchor at 0 is used and the window is padded.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidInputError

WHITE_PAD = "white_pad"


@dataclass(frozen=True)
class GridPlan:
    patch_px: int
    stride_px: int
    positions: tuple[tuple[int, int], ...]  # row-major (x, y) anchors
    target_um_per_px: float
    pad_policy: str
    extent_px: tuple[int, int]

    @property
    def overlap_px(self) -> int:
        return self.patch_px - self.stride_px


def axis_anchors(dim: int, patch_px: int, stride_px: int) -> list[int]:
    if dim < patch_px:
        return [0]
    anchors = list(range(0, dim - patch_px + 1, stride_px))
    if (dim - patch_px) % stride_px != 0:
        anchors.append(dim - patch_px)
    return anchors


def plan_grid(
    extent_px,
    patch_px: int,
    overlap_px: int,
    pad_policy: str = WHITE_PAD,
    target_um_per_px: float = 1.0,
) -> GridPlan:
    width, height = int(extent_px[0]), int(extent_px[1])
    if width <= 0 or height <= 0:
        raise InvalidInputError(f"extent must be positive, got {extent_px!r}")
    if patch_px <= 0:
        raise InvalidInputError(f"patch_px must be positive, got {patch_px}")
    if not 0 <= overlap_px < patch_px:
        raise InvalidInputError(f"overlap_px must be in [0, patch_px), got {overlap_px}")
    if pad_policy != WHITE_PAD:
        raise InvalidInputError(f"unknown pad policy {pad_policy!r}")
    stride = patch_px - overlap_px
    xs = axis_anchors(width, patch_px, stride)
    ys = axis_anchors(height, patch_px, stride)
    positions = tuple((x, y) for y in ys for x in xs)
    return GridPlan(
        patch_px=patch_px,
        stride_px=stride,
        positions=positions,
        target_um_per_px=target_um_per_px,
        pad_policy=pad_policy,
        extent_px=(width, height),
    )
