"""Cohort characteristics: binned age/PSA/grade/length summaries.

Age and PSA rows are computed over patients, grade and cancer-length rows
over slides, each rendered as count plus percentage of its section total.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from ..metrics.report import percent_str
from .manifest import CohortManifest, PSA_ELEVATED

AGE_BIN_LABELS = ["<=49", "50-54", "55-59", "60-64", "65-69", ">=70"]
PSA_BIN_LABELS = ["0-3", ">3-5", ">5-10", ">=10", "Elevated", "Missing"]
ISUP_BIN_LABELS = [
    "Benign",
    "ISUP 1 (3+3)",
    "ISUP 2 (3+4)",
    "ISUP 3 (4+3)",
    "ISUP 4 (4+4, 3+5, 5+3)",
    "ISUP 5 (4+5, 5+4, 5+5)",
]
LENGTH_BIN_LABELS = ["No cancer", ">0-1", ">1-5", ">5-10", ">10", "Missing"]
MISSING = "Missing"
UNGRADED = "Malignant, ungraded"


@dataclass(frozen=True)
class BinRow:
    label: str
    count: int
    percent: str


@dataclass(frozen=True)
class CohortCharacteristics:
    cohort_id: str
    dataset_type: str
    scanner_model: str
    pathologist_count: int | None
    n_patients: int
    n_slides: int
    age_rows: tuple[BinRow, ...]
    psa_rows: tuple[BinRow, ...]
    isup_rows: tuple[BinRow, ...]
    length_rows: tuple[BinRow, ...]


def age_bin(age: int | None) -> str:
    if age is None:
        return MISSING
    if age <= 49:
        return "<=49"
    if age >= 70:
        return ">=70"
    lo = (age // 5) * 5
    return f"{lo}-{lo + 4}"


def psa_bin(psa) -> str:
    if psa is None:
        return MISSING
    if psa == PSA_ELEVATED:
        return "Elevated"
    if psa <= 3:
        return "0-3"
    if psa <= 5:
        return ">3-5"
    if psa < 10:
        return ">5-10"
    return ">=10"


def isup_bin(slide) -> str:
    if slide.truth == "benign":
        return "Benign"
    if slide.isup is None:
        return UNGRADED
    return ISUP_BIN_LABELS[slide.isup]


def length_bin(slide) -> str:
    if slide.truth == "benign":
        return "No cancer"
    length = slide.cancer_length_mm
    if length is None:
        return MISSING
    if length <= 1:
        return ">0-1"
    if length <= 5:
        return ">1-5"
    if length <= 10:
        return ">5-10"
    return ">10"


def _rows(labels, counts, total) -> tuple[BinRow, ...]:
    rows = []
    for label in labels:
        count = counts.get(label, 0)
        rows.append(BinRow(label=label, count=count, percent=percent_str(count, total)))
    for label, count in counts.items():
        if label not in labels:  # e.g. Missing ages, ungraded malignant
            rows.append(BinRow(label=label, count=count, percent=percent_str(count, total)))
    return tuple(rows)


def characteristics_table(manifest: CohortManifest) -> CohortCharacteristics:
    age_counts: dict[str, int] = {}
    psa_counts: dict[str, int] = {}
    for patient in manifest.patients:
        age_counts[age_bin(patient.age_years)] = age_counts.get(age_bin(patient.age_years), 0) + 1
        psa_counts[psa_bin(patient.psa_ng_ml)] = psa_counts.get(psa_bin(patient.psa_ng_ml), 0) + 1
    isup_counts: dict[str, int] = {}
    length_counts: dict[str, int] = {}
    for slide in manifest.slides:
        isup_counts[isup_bin(slide)] = isup_counts.get(isup_bin(slide), 0) + 1
        length_counts[length_bin(slide)] = length_counts.get(length_bin(slide), 0) + 1
    n_patients = len(manifest.patients)
    n_slides = len(manifest.slides)
    return CohortCharacteristics(
        cohort_id=manifest.cohort_id,
        dataset_type=manifest.dataset_type,
        scanner_model=manifest.scanner_model,
        pathologist_count=manifest.pathologist_count,
        n_patients=n_patients,
        n_slides=n_slides,
        age_rows=_rows(AGE_BIN_LABELS, age_counts, n_patients),
        psa_rows=_rows(PSA_BIN_LABELS, psa_counts, n_patients),
        isup_rows=_rows(ISUP_BIN_LABELS, isup_counts, n_slides),
        length_rows=_rows(LENGTH_BIN_LABELS, length_counts, n_slides),
    )


def _sections(table: CohortCharacteristics):
    return [
        ("Age (years)", table.age_rows),
        ("Prostate-specific antigen (ng/ml)", table.psa_rows),
        ("ISUP grades (Gleason scores)", table.isup_rows),
        ("Cancer length (mm)", table.length_rows),
    ]


def characteristics_markdown(table: CohortCharacteristics) -> str:
    lines = [
        f"# Cohort characteristics: {table.cohort_id or 'unnamed cohort'}",
        "",
        f"- Dataset type: {table.dataset_type}",
        f"- Scanner model: {table.scanner_model or 'n/a'}",
        f"- Pathologists represented: {table.pathologist_count if table.pathologist_count is not None else 'n/a'}",
        f"- Number of patients: n = {table.n_patients}",
        f"- Number of WSIs: n = {table.n_slides}",
        "",
        "| Characteristic | Count (%) |",
        "| --- | --- |",
    ]
    for section, rows in _sections(table):
        lines.append(f"| **{section}** | |")
        for row in rows:
            lines.append(f"| {row.label} | {row.count} ({row.percent}%) |")
    return "\n".join(lines) + "\n"


def characteristics_csv(table: CohortCharacteristics) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "bin", "count", "percent"])
    for section, rows in _sections(table):
        for row in rows:
            writer.writerow([section, row.label, row.count, row.percent])
    return buf.getvalue()


def characteristics_json(table: CohortCharacteristics) -> str:
    payload = {
        "cohort_id": table.cohort_id,
        "dataset_type": table.dataset_type,
        "scanner_model": table.scanner_model,
        "pathologist_count": table.pathologist_count,
        "n_patients": table.n_patients,
        "n_slides": table.n_slides,
        "sections": {
            section: [
                {"bin": row.label, "count": row.count, "percent": row.percent} for row in rows
            ]
            for section, rows in _sections(table)
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
