"""Decision-support toolkit for IHC triage of prostate biopsy slides.

Subpackages: tiling (WSI patch extraction), mil (attention-pooled ensemble
inference), metrics (operating-point evaluation), cohort (manifests and
characteristics), review (recommendation service and blinded sessions).
"""

__version__ = "0.1.0"
