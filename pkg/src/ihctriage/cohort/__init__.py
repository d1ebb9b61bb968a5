from .characteristics import (
    CohortCharacteristics,
    characteristics_csv,
    characteristics_json,
    characteristics_markdown,
    characteristics_table,
)
from .inclusion import BASAL_MARKERS, InclusionLedger, filter_ihc_basal, is_basal_stain
from .manifest import (
    CSV_COLUMNS,
    CohortManifest,
    PatientRecord,
    SlideRecord,
    labeled_predictions,
    manifest_to_csv,
    manifest_to_json,
    parse_manifest,
    save_manifest,
    validate_manifest,
)

__all__ = [
    "CohortCharacteristics",
    "characteristics_csv",
    "characteristics_json",
    "characteristics_markdown",
    "characteristics_table",
    "BASAL_MARKERS",
    "InclusionLedger",
    "filter_ihc_basal",
    "is_basal_stain",
    "CSV_COLUMNS",
    "CohortManifest",
    "PatientRecord",
    "SlideRecord",
    "labeled_predictions",
    "manifest_to_csv",
    "manifest_to_json",
    "parse_manifest",
    "save_manifest",
    "validate_manifest",
]
