"""Embedding-bag files and the demo featurizer.

Real deployments load per-tile embeddings produced by an external encoder;
the JSON layout here is deliberately simple so any stack can export it:

  {"slide_id": ..., "target_um_per_px": ..., "feature_dim": D,
   "tiles": [{"anchor": [x, y], "feature": [f0, ..., fD-1]}, ...]}

For the bundled demo, `toy_features` derives a deterministic embedding from
patch pixels (a coarse downsample plus channel statistics). It stands in
for a real encoder and has no diagnostic meaning.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import InvalidInputError
from ..tiling.archive import iter_archive
from .abmil import EmbeddingBag


def save_bag(bag: EmbeddingBag, path) -> None:
    payload = {
        "slide_id": bag.slide_id,
        "target_um_per_px": bag.target_um_per_px,
        "feature_dim": bag.feature_dim,
        "tiles": [
            {"anchor": [x, y], "feature": [float(v) for v in row]}
            for (x, y), row in zip(bag.anchors, bag.features)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_bag(path) -> EmbeddingBag:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    tiles = payload.get("tiles", [])
    if not tiles:
        raise InvalidInputError(f"embedding bag {path} has no tiles")
    anchors = tuple((int(t["anchor"][0]), int(t["anchor"][1])) for t in tiles)
    features = np.asarray([t["feature"] for t in tiles], dtype=np.float64)
    if features.shape[1] != payload["feature_dim"]:
        raise InvalidInputError(f"feature_dim mismatch in {path}")
    return EmbeddingBag(
        slide_id=payload["slide_id"],
        anchors=anchors,
        features=features,
        target_um_per_px=float(payload.get("target_um_per_px", 1.0)),
    )


def toy_features(pixels: bytes, patch_px: int, feature_dim: int) -> np.ndarray:
    """Deterministic per-patch feature vector (demo stand-in for an encoder)."""
    patch = np.frombuffer(pixels, dtype=np.uint8).reshape(patch_px, patch_px, 3)
    patch = patch.astype(np.float64) / 255.0
    grid = 4
    step = patch_px // grid
    coarse = patch[: step * grid, : step * grid].reshape(grid, step, grid, step, 3)
    coarse = coarse.mean(axis=(1, 3)).reshape(-1)  # 48 values
    stats = np.concatenate([patch.mean(axis=(0, 1)), patch.std(axis=(0, 1))])  # 6 values
    base = (np.concatenate([coarse, stats]) - 0.5) * 4.0
    if feature_dim <= base.size:
        return base[:feature_dim]
    reps = int(np.ceil(feature_dim / base.size))
    return np.tile(base, reps)[:feature_dim]


def bag_from_archive(archive_path, feature_dim: int) -> EmbeddingBag:
    """Build a demo embedding bag directly from a patch archive."""
    header, records = iter_archive(archive_path)
    anchors = []
    features = []
    for record in records:
        anchors.append(record.anchor)
        features.append(toy_features(record.pixels, header.patch_px, feature_dim))
    if not anchors:
        raise InvalidInputError(f"archive {archive_path} holds no patches")
    return EmbeddingBag(
        slide_id=header.slide_id,
        anchors=tuple(anchors),
        features=np.asarray(features),
        target_um_per_px=header.target_um_per_px,
    )
