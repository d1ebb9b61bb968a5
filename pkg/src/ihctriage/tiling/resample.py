"""Lanczos-3 downsampling of RGB rasters.

Separable implementation with the kernel widened by the downsampling
factor (antialiasing), weights normalized per output pixel, float64
accumulation, and round-half-even quantization back to uint8. Identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError

LANCZOS_A = 3


def lanczos_kernel(x: np.ndarray, a: int = LANCZOS_A) -> np.ndarray:
    """sinc(x) * sinc(x/a) on |x| < a, zero outside."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < a
    xi = x[inside]
    out[inside] = np.sinc(xi) * np.sinc(xi / a)
    return out


def _axis_weights(out_size: int, in_size: int, factor: float, offset: float):
    """Sparse (dense small-band) weights mapping in_size samples to out_size."""
    support = LANCZOS_A * max(factor, 1.0)
    centers = offset + (np.arange(out_size) + 0.5) * factor - 0.5
    left = np.ceil(centers - support).astype(np.int64)
    width = int(np.floor(2 * support)) + 2
    taps = left[:, None] + np.arange(width)[None, :]
    weights = lanczos_kernel((taps - centers[:, None]) / max(factor, 1.0))
    weights[(taps < 0) | (taps >= in_size)] = 0.0
    norm = weights.sum(axis=1, keepdims=True)
    if np.any(norm == 0):
        raise InvalidInputError("source window does not cover the target footprint")
    weights /= norm
    taps = np.clip(taps, 0, in_size - 1)
    return taps, weights


def resample_patch(
    source: np.ndarray,
    factor: float,
    out_size: tuple[int, int],
    offset: tuple[float, float] = (0.0, 0.0),
) -> np.ndarray:
    """Downsample an RGB raster by `factor` to exactly out_size (w, h).

    `offset` is the sub-pixel position (x, y) of the target window's origin
    within `source`, in source pixels. Factor 1 with integer alignment is
    an exact byte copy.
    """
    source = np.asarray(source, dtype=np.uint8)
    if source.ndim != 3 or source.shape[2] != 3:
        raise InvalidInputError("source must be (h, w, 3) RGB")
    if factor < 1.0 - 1e-9:
        raise InvalidInputError(f"never upsample: factor {factor} < 1")
    out_w, out_h = int(out_size[0]), int(out_size[1])
    off_x, off_y = float(offset[0]), float(offset[1])

    if abs(factor - 1.0) <= 1e-9 and off_x.is_integer() and off_y.is_integer():
        x0, y0 = int(off_x), int(off_y)
        if x0 < 0 or y0 < 0 or x0 + out_w > source.shape[1] or y0 + out_h > source.shape[0]:
            raise InvalidInputError("source window does not cover the target footprint")
        return source[y0 : y0 + out_h, x0 : x0 + out_w].copy()

    taps_x, weights_x = _axis_weights(out_w, source.shape[1], factor, off_x)
    taps_y, weights_y = _axis_weights(out_h, source.shape[0], factor, off_y)
    data = source.astype(np.float64)
    horiz = (data[:, taps_x, :] * weights_x[None, :, :, None]).sum(axis=2)  # (h, out_w, 3)
    out = (horiz[taps_y, :, :] * weights_y[:, :, None, None]).sum(axis=1)  # (out_h, out_w, 3)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
