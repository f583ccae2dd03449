"""Exception hierarchy shared across the toolkit.

Every error the package raises deliberately derives from DriftAuditError so
callers (CLI, service) can map failures to exit codes / HTTP statuses in one
place.
"""


class DriftAuditError(Exception):
    """Base class for all toolkit errors."""


class EmptyInput(DriftAuditError):
    """An operation received zero samples."""


class WrongTaskKind(DriftAuditError):
    """A metric or operation was applied to an incompatible task kind."""


class MissingParam(DriftAuditError):
    """A metric spec lacks a parameter it requires."""


class InvalidParam(DriftAuditError):
    """A parameter value is outside its documented domain."""


class UnknownShift(DriftAuditError):
    """A shift name is not in the perturbation catalogue."""


class UnknownMetric(DriftAuditError):
    """A metric name is not in the metric catalogue."""


class ParseError(DriftAuditError):
    """Malformed plan / tag / manifest text."""


class SchemaError(DriftAuditError):
    """A dataset manifest is structurally invalid."""


class TagNotFound(DriftAuditError):
    """No well-formed tag pair was found in a message."""


class PhaseFailure(DriftAuditError):
    """A dialogue phase did not produce a valid outcome.

    Carries the partial transcript so the caller can persist it.
    """

    def __init__(self, message: str, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class BackendError(DriftAuditError):
    """The chat backend failed (network, credentials, exhausted script)."""


class AdapterError(DriftAuditError):
    """A model adapter could not produce predictions."""

    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


class ProtocolError(DriftAuditError):
    """A model server replied with a malformed message."""


class StructureError(DriftAuditError):
    """An analysis draft is missing required report sections."""


class EmptyPipeline(DriftAuditError):
    """No recognizable operation in an augmentation recommendation."""


class VersionError(DriftAuditError):
    """A serialized artifact declares an unsupported format version."""
