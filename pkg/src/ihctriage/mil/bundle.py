"""Head-weight bundles: a zip holding a shape manifest plus raw tensors.

The container is a plain zip archive with two entries:

  manifest.json  {"format": "ihctriage-head-bundle", "version": 1,
                  "feature_dim": D, "attention_dim": L, "dtype": "<f8",
                  "layout": "row-major",
                  "members": [{"fold": f, "tta": t,
                               "tensors": {name: {"shape": [...],
                                                  "offset": o, "size": s}}}]}
  tensors.bin    the concatenated little-endian float64 tensors

Offsets and sizes are bytes into tensors.bin; every tensor is row-major.
Writes are deterministic (fixed zip timestamps, stored entries) so a bundle
written twice from the same weights is byte-identical.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

from ..errors import ConfigurationError
from .abmil import HeadParams
from .ensemble import MEMBER_IDS

FORMAT_NAME = "ihctriage-head-bundle"
FORMAT_VERSION = 1
_TENSOR_NAMES = (
    "attention_v",
    "attention_w",
    "primary_weight",
    "primary_bias",
    "secondary_weight",
    "secondary_bias",
    "cancer_weight",
    "cancer_bias",
)
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def save_bundle(members: dict[tuple[int, int], HeadParams], path) -> None:
    if sorted(members) != sorted(MEMBER_IDS):
        raise ConfigurationError("bundle must contain exactly the 30 (fold, tta) members")
    blob = io.BytesIO()
    manifest_members = []
    offset = 0
    feature_dim = members[MEMBER_IDS[0]].feature_dim
    attention_dim = members[MEMBER_IDS[0]].attention_dim
    for member_id in MEMBER_IDS:
        params = members[member_id]
        if params.feature_dim != feature_dim or params.attention_dim != attention_dim:
            raise ConfigurationError("all members must share D and L")
        tensors = {}
        for name in _TENSOR_NAMES:
            value = getattr(params, name)
            arr = np.ascontiguousarray(np.atleast_1d(np.asarray(value, dtype="<f8")))
            raw = arr.tobytes()
            tensors[name] = {
                "shape": [] if name == "cancer_bias" else list(arr.shape),
                "offset": offset,
                "size": len(raw),
            }
            blob.write(raw)
            offset += len(raw)
        manifest_members.append(
            {"fold": member_id[0], "tta": member_id[1], "tensors": tensors}
        )
    manifest = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "feature_dim": feature_dim,
        "attention_dim": attention_dim,
        "dtype": "<f8",
        "layout": "row-major",
        "members": manifest_members,
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        info = zipfile.ZipInfo("manifest.json", date_time=_ZIP_EPOCH)
        zf.writestr(info, json.dumps(manifest, indent=2, sort_keys=True))
        info = zipfile.ZipInfo("tensors.bin", date_time=_ZIP_EPOCH)
        zf.writestr(info, blob.getvalue())


def load_bundle(path) -> dict[tuple[int, int], HeadParams]:
    try:
        with zipfile.ZipFile(path) as zf:
            manifest = json.loads(zf.read("manifest.json"))
            blob = zf.read("tensors.bin")
    except (zipfile.BadZipFile, KeyError) as exc:
        raise ConfigurationError(f"not a head bundle: {path} ({exc})") from exc
    if manifest.get("format") != FORMAT_NAME:
        raise ConfigurationError(f"unexpected bundle format {manifest.get('format')!r}")
    if manifest.get("version") != FORMAT_VERSION:
        raise ConfigurationError(f"unsupported bundle version {manifest.get('version')!r}")

    members = {}
    for entry in manifest["members"]:
        member_id = (entry["fold"], entry["tta"])
        values = {}
        for name in _TENSOR_NAMES:
            meta = entry["tensors"][name]
            raw = blob[meta["offset"] : meta["offset"] + meta["size"]]
            arr = np.frombuffer(raw, dtype="<f8").reshape(meta["shape"])
            values[name] = float(arr) if name == "cancer_bias" else arr
        members[member_id] = HeadParams(member_id=member_id, **values)
    if sorted(members) != sorted(MEMBER_IDS):
        raise ConfigurationError("bundle does not cover the 30 (fold, tta) members")
    return members


def random_bundle(feature_dim: int, attention_dim: int, seed: int) -> dict[tuple[int, int], HeadParams]:
    """A fixed pseudo-random bundle for demos and tests."""
    rng = np.random.default_rng(seed)
    members = {}
    for member_id in MEMBER_IDS:
        members[member_id] = HeadParams(
            member_id=member_id,
            attention_v=rng.normal(0, 1, (feature_dim, attention_dim)),
            attention_w=rng.normal(0, 1, attention_dim),
            primary_weight=rng.normal(0, 1, (4, feature_dim)),
            primary_bias=rng.normal(0, 1, 4),
            secondary_weight=rng.normal(0, 1, (4, feature_dim)),
            secondary_bias=rng.normal(0, 1, 4),
            cancer_weight=rng.normal(0, 1, feature_dim),
            cancer_bias=float(rng.normal(0, 1)),
        )
    return members
