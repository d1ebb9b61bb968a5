"""Loading and summarizing slide prediction files.

`predict` writes one JSON per slide (see mil.ensemble.prediction_to_json).
Evaluation accepts either a directory of those files or a single JSON
summary: a list of {"slide_id", "cancer_probability", ...} objects or an
object with a "predictions" list.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InvalidInputError


def _entry(obj: dict) -> tuple[str, dict]:
    if "slide_id" not in obj or "cancer_probability" not in obj:
        raise InvalidInputError("prediction entry needs slide_id and cancer_probability")
    return obj["slide_id"], {
        "cancer_probability": float(obj["cancer_probability"]),
        "final_isup": obj.get("final_isup"),
        "final_gleason": obj.get("final_gleason"),
    }


def _entries(payload):
    if isinstance(payload, dict) and "predictions" in payload:
        payload = payload["predictions"]
    if isinstance(payload, dict):
        payload = [payload]
    return [_entry(obj) for obj in payload]


def load_predictions(path) -> dict[str, dict]:
    """slide_id -> {cancer_probability, final_isup, final_gleason}."""
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"predictions not found: {path}")
    out: dict[str, dict] = {}
    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            raise InvalidInputError(f"no prediction JSON files in {path}")
    else:
        files = [path]
    for file in files:
        for slide_id, entry in _entries(json.loads(file.read_text(encoding="utf-8"))):
            out[slide_id] = entry
    return out


def probabilities(predictions: dict[str, dict]) -> dict[str, float]:
    return {slide_id: entry["cancer_probability"] for slide_id, entry in predictions.items()}


def save_summary(predictions: dict[str, dict], path) -> None:
    payload = {
        "predictions": [
            {"slide_id": slide_id, **entry} for slide_id, entry in sorted(predictions.items())
        ]
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
