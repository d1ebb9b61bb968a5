"""Cohort manifests: slide-level ground truth plus patient demographics.

Two on-disk forms are accepted. The JSON form mirrors the in-memory layout;
the CSV form is one denormalized row per slide with these columns:

  cohort_id, dataset_type, scanner_model, pathologist_count,
  slide_id, patient_id, truth, isup, gleason_primary, gleason_secondary,
  cancer_length_mm, ihc_requested, stain_type, label_level,
  age_years, psa_ng_ml

`truth` is benign|malignant; `label_level` is slide|location (grades for
location-level cohorts describe the sampled location, not the individual
slide); `psa_ng_ml` is a number, the literal "elevated", or empty for
missing. Validation reports every offending row, not just the first.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ManifestError
from ..mil.gleason import BENIGN, gleason_to_isup

CSV_COLUMNS = [
    "cohort_id",
    "dataset_type",
    "scanner_model",
    "pathologist_count",
    "slide_id",
    "patient_id",
    "truth",
    "isup",
    "gleason_primary",
    "gleason_secondary",
    "cancer_length_mm",
    "ihc_requested",
    "stain_type",
    "label_level",
    "age_years",
    "psa_ng_ml",
]

PSA_ELEVATED = "elevated"
_TRUE = {"true", "1", "yes", "y"}
_FALSE = {"false", "0", "no", "n", ""}


@dataclass(frozen=True)
class SlideRecord:
    slide_id: str
    patient_id: str
    cohort_id: str
    truth: str  # benign | malignant
    isup: int | None = None
    gleason: tuple[int, int] | None = None
    cancer_length_mm: float | None = None
    ihc_requested: bool = True
    stain_type: str | None = None
    label_level: str = "slide"

    def reference_class(self):
        """benign or the ISUP grade; None for ungraded malignant slides."""
        return BENIGN if self.truth == BENIGN else self.isup


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    age_years: int | None = None
    psa_ng_ml: float | str | None = None  # number | "elevated" | None


@dataclass(frozen=True)
class CohortManifest:
    cohort_id: str
    dataset_type: str
    slides: tuple[SlideRecord, ...]
    patients: tuple[PatientRecord, ...]
    scanner_model: str = ""
    pathologist_count: int | None = None

    def patient(self, patient_id: str) -> PatientRecord:
        return self._patient_index[patient_id]

    def __post_init__(self):
        object.__setattr__(self, "_patient_index", {p.patient_id: p for p in self.patients})


def _validate_slide(slide: SlideRecord, where: str, problems: list[str]) -> None:
    if slide.truth not in (BENIGN, "malignant"):
        problems.append(f"{where}: truth must be benign/malignant, got {slide.truth!r}")
        return
    if slide.truth == BENIGN:
        if slide.isup is not None:
            problems.append(f"{where}: benign slide carries ISUP {slide.isup}")
        if slide.gleason is not None:
            problems.append(f"{where}: benign slide carries a Gleason score")
        if slide.cancer_length_mm not in (None, 0, 0.0):
            problems.append(f"{where}: benign slide has cancer length {slide.cancer_length_mm}")
    else:
        if slide.label_level == "slide" and slide.isup is None:
            problems.append(f"{where}: malignant slide-level record needs an ISUP grade")
        if slide.cancer_length_mm is not None and slide.cancer_length_mm < 0:
            problems.append(f"{where}: negative cancer length")
        if slide.gleason is not None:
            try:
                derived = gleason_to_isup(*slide.gleason)
            except Exception:
                problems.append(f"{where}: invalid Gleason pair {slide.gleason}")
            else:
                if slide.isup is not None and derived != slide.isup:
                    problems.append(
                        f"{where}: ISUP {slide.isup} inconsistent with Gleason "
                        f"{slide.gleason[0]}+{slide.gleason[1]} (= ISUP {derived})"
                    )
    if slide.label_level not in ("slide", "location"):
        problems.append(f"{where}: label_level must be slide/location, got {slide.label_level!r}")


def validate_manifest(manifest: CohortManifest) -> list[str]:
    problems: list[str] = []
    seen = set()
    known_patients = {p.patient_id for p in manifest.patients}
    for i, slide in enumerate(manifest.slides):
        where = f"slide {slide.slide_id or i}"
        if slide.slide_id in seen:
            problems.append(f"{where}: duplicate slide_id")
        seen.add(slide.slide_id)
        if slide.patient_id not in known_patients:
            problems.append(f"{where}: unknown patient {slide.patient_id!r}")
        _validate_slide(slide, where, problems)
    for patient in manifest.patients:
        if patient.age_years is not None and patient.age_years < 0:
            problems.append(f"patient {patient.patient_id}: negative age")
        psa = patient.psa_ng_ml
        if psa is not None and not isinstance(psa, (int, float)) and psa != PSA_ELEVATED:
            problems.append(f"patient {patient.patient_id}: unparseable PSA {psa!r}")
        if isinstance(psa, (int, float)) and psa < 0:
            problems.append(f"patient {patient.patient_id}: negative PSA")
    return problems


def _opt_int(raw: str, where: str, what: str, problems: list[str]) -> int | None:
    raw = raw.strip()
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        problems.append(f"{where}: {what} is not an integer: {raw!r}")
        return None


def _opt_float(raw: str, where: str, what: str, problems: list[str]) -> float | None:
    raw = raw.strip()
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        problems.append(f"{where}: {what} is not a number: {raw!r}")
        return None


def _parse_bool(raw: str, where: str, problems: list[str]) -> bool:
    token = raw.strip().lower()
    if token in _TRUE:
        return True
    if token in _FALSE:
        return False
    problems.append(f"{where}: ihc_requested is not a boolean: {raw!r}")
    return False


def _parse_psa(raw: str, where: str, problems: list[str]):
    token = raw.strip().lower()
    if not token:
        return None
    if token == PSA_ELEVATED:
        return PSA_ELEVATED
    try:
        return float(token)
    except ValueError:
        problems.append(f"{where}: psa_ng_ml is not a number or 'elevated': {raw!r}")
        return None


def _rows_to_manifest(rows, problems: list[str]) -> CohortManifest:
    slides = []
    patients: dict[str, PatientRecord] = {}
    cohort_meta: dict[str, object] = {}
    for line_no, row in rows:
        where = f"row {line_no}"
        gp = _opt_int(row.get("gleason_primary", ""), where, "gleason_primary", problems)
        gs = _opt_int(row.get("gleason_secondary", ""), where, "gleason_secondary", problems)
        if (gp is None) != (gs is None):
            problems.append(f"{where}: gleason primary/secondary must come together")
        slide = SlideRecord(
            slide_id=row.get("slide_id", "").strip(),
            patient_id=row.get("patient_id", "").strip(),
            cohort_id=row.get("cohort_id", "").strip(),
            truth=row.get("truth", "").strip().lower(),
            isup=_opt_int(row.get("isup", ""), where, "isup", problems),
            gleason=(gp, gs) if gp is not None and gs is not None else None,
            cancer_length_mm=_opt_float(
                row.get("cancer_length_mm", ""), where, "cancer_length_mm", problems
            ),
            ihc_requested=_parse_bool(row.get("ihc_requested", "true"), where, problems),
            stain_type=(row.get("stain_type", "").strip() or None),
            label_level=(row.get("label_level", "").strip().lower() or "slide"),
        )
        if not slide.slide_id:
            problems.append(f"{where}: missing slide_id")
        if not slide.patient_id:
            problems.append(f"{where}: missing patient_id")
        slides.append(slide)

        patient = PatientRecord(
            patient_id=slide.patient_id,
            age_years=_opt_int(row.get("age_years", ""), where, "age_years", problems),
            psa_ng_ml=_parse_psa(row.get("psa_ng_ml", ""), where, problems),
        )
        previous = patients.get(patient.patient_id)
        if previous is None:
            patients[patient.patient_id] = patient
        elif previous != patient:
            problems.append(
                f"{where}: patient {patient.patient_id} disagrees with an earlier row"
            )

        for key in ("cohort_id", "dataset_type", "scanner_model", "pathologist_count"):
            value = row.get(key, "").strip()
            if value:
                if key in cohort_meta and cohort_meta[key] != value:
                    problems.append(f"{where}: {key} disagrees with an earlier row")
                cohort_meta.setdefault(key, value)

    count = cohort_meta.get("pathologist_count")
    return CohortManifest(
        cohort_id=str(cohort_meta.get("cohort_id", "")),
        dataset_type=str(cohort_meta.get("dataset_type", "external")),
        scanner_model=str(cohort_meta.get("scanner_model", "")),
        pathologist_count=int(count) if count else None,
        slides=tuple(slides),
        patients=tuple(patients.values()),
    )


def parse_manifest(path) -> CohortManifest:
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"manifest not found: {path}")
    problems: list[str] = []
    if path.suffix.lower() == ".json":
        manifest = _parse_json(path, problems)
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "slide_id" not in reader.fieldnames:
                raise ManifestError(f"{path}: not a manifest CSV (no slide_id column)")
            rows = [(i + 2, row) for i, row in enumerate(reader)]  # header is line 1
        manifest = _rows_to_manifest(rows, problems)
    problems.extend(validate_manifest(manifest))
    if problems:
        raise ManifestError(
            f"{path}: {len(problems)} manifest violation(s)", violations=problems
        )
    return manifest


def _parse_json(path, problems: list[str]) -> CohortManifest:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    slides = []
    for i, s in enumerate(payload.get("slides", [])):
        gleason = s.get("gleason")
        slides.append(
            SlideRecord(
                slide_id=s.get("slide_id", ""),
                patient_id=s.get("patient_id", ""),
                cohort_id=s.get("cohort_id", payload.get("cohort_id", "")),
                truth=s.get("truth", ""),
                isup=s.get("isup"),
                gleason=tuple(gleason) if gleason else None,
                cancer_length_mm=s.get("cancer_length_mm"),
                ihc_requested=bool(s.get("ihc_requested", True)),
                stain_type=s.get("stain_type"),
                label_level=s.get("label_level", "slide"),
            )
        )
    patients = [
        PatientRecord(
            patient_id=p.get("patient_id", ""),
            age_years=p.get("age_years"),
            psa_ng_ml=p.get("psa_ng_ml"),
        )
        for p in payload.get("patients", [])
    ]
    return CohortManifest(
        cohort_id=payload.get("cohort_id", ""),
        dataset_type=payload.get("dataset_type", "external"),
        scanner_model=payload.get("scanner_model", ""),
        pathologist_count=payload.get("pathologist_count"),
        slides=tuple(slides),
        patients=tuple(patients),
    )


def manifest_to_json(manifest: CohortManifest) -> str:
    payload = {
        "cohort_id": manifest.cohort_id,
        "dataset_type": manifest.dataset_type,
        "scanner_model": manifest.scanner_model,
        "pathologist_count": manifest.pathologist_count,
        "slides": [
            {
                "slide_id": s.slide_id,
                "patient_id": s.patient_id,
                "cohort_id": s.cohort_id,
                "truth": s.truth,
                "isup": s.isup,
                "gleason": list(s.gleason) if s.gleason else None,
                "cancer_length_mm": s.cancer_length_mm,
                "ihc_requested": s.ihc_requested,
                "stain_type": s.stain_type,
                "label_level": s.label_level,
            }
            for s in manifest.slides
        ],
        "patients": [
            {
                "patient_id": p.patient_id,
                "age_years": p.age_years,
                "psa_ng_ml": p.psa_ng_ml,
            }
            for p in manifest.patients
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def manifest_to_csv(manifest: CohortManifest) -> str:
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for slide in manifest.slides:
        patient = manifest.patient(slide.patient_id)
        writer.writerow(
            {
                "cohort_id": manifest.cohort_id,
                "dataset_type": manifest.dataset_type,
                "scanner_model": manifest.scanner_model,
                "pathologist_count": manifest.pathologist_count or "",
                "slide_id": slide.slide_id,
                "patient_id": slide.patient_id,
                "truth": slide.truth,
                "isup": slide.isup if slide.isup is not None else "",
                "gleason_primary": slide.gleason[0] if slide.gleason else "",
                "gleason_secondary": slide.gleason[1] if slide.gleason else "",
                "cancer_length_mm": (
                    format(slide.cancer_length_mm, "g")
                    if slide.cancer_length_mm is not None
                    else ""
                ),
                "ihc_requested": "true" if slide.ihc_requested else "false",
                "stain_type": slide.stain_type or "",
                "label_level": slide.label_level,
                "age_years": patient.age_years if patient.age_years is not None else "",
                "psa_ng_ml": (
                    patient.psa_ng_ml
                    if isinstance(patient.psa_ng_ml, str)
                    else format(patient.psa_ng_ml, "g")
                    if patient.psa_ng_ml is not None
                    else ""
                ),
            }
        )
    return buf.getvalue()


def save_manifest(manifest: CohortManifest, path) -> None:
    path = Path(path)
    text = manifest_to_json(manifest) if path.suffix.lower() == ".json" else manifest_to_csv(manifest)
    path.write_text(text, encoding="utf-8")


def labeled_predictions(manifest: CohortManifest, probabilities: dict[str, float]):
    """Join manifest truth with per-slide probabilities for evaluation."""
    from ..metrics import LabeledPrediction

    missing = [s.slide_id for s in manifest.slides if s.slide_id not in probabilities]
    if missing:
        raise ManifestError(
            f"no prediction for {len(missing)} slide(s): {', '.join(missing[:5])}"
            + ("..." if len(missing) > 5 else "")
        )
    return [
        LabeledPrediction(
            slide_id=s.slide_id,
            truth=s.truth,
            cancer_probability=probabilities[s.slide_id],
            truth_isup=s.isup if s.truth == "malignant" else None,
            cohort_id=manifest.cohort_id,
            label_level=s.label_level,
        )
        for s in manifest.slides
    ]
