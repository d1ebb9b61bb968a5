"""Exception types shared across the toolkit."""


class TriageError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(TriageError, ValueError):
    """An argument violates a documented precondition."""


class ConfigurationError(TriageError):
    """Inconsistent weights, shapes, or service configuration."""


class NumericError(TriageError):
    """Non-finite values where finite ones are required."""


class UnsupportedSlideError(TriageError):
    """The slide pyramid cannot serve the requested resolution."""


class ArchiveFormatError(TriageError):
    """A patch archive is corrupt or not in the expected format."""


class UndefinedMetricError(TriageError):
    """A metric has no value for the given inputs (e.g. single-class AUC)."""


class InvalidEnsembleError(TriageError):
    """Ensemble members are missing, duplicated, or inconsistent."""


class ManifestError(TriageError):
    """A cohort manifest failed schema or invariant validation."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class NotFoundError(TriageError):
    """A referenced slide, session, or case does not exist."""


class ConflictError(TriageError):
    """A write conflicts with session state (duplicate, finalized, ...)."""


class CannotBalanceError(TriageError):
    """The decoy pool cannot satisfy the class-balance rule."""


class InvalidEventError(TriageError):
    """A trust event does not apply to the slide's prediction state."""
