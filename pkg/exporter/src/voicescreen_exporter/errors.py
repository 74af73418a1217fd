"""Exception types for the exporter.

Mirrors the convention of the main package: one base class, and a concrete
subclass per failure mode so callers never have to match on message text.
"""


class ExporterError(Exception):
    """Base class for all exporter errors."""


class InvalidExportSpec(ExporterError):
    """An ExportSpec field is missing, unknown, or inconsistent."""


class MalformedManifest(ExporterError):
    """A manifest line is not valid JSON or lacks required fields."""


class DuplicateId(ExporterError):
    """The same recording id appears twice in the manifest."""


class MissingField(ExporterError):
    """A manifest row lacks the input the requested kind needs."""


class ModelUnavailable(ExporterError):
    """A pretrained model could not be loaded on this machine."""


class AudioDecodeFailure(ExporterError):
    """A WAV file referenced by the manifest could not be decoded.

    The message always starts with the recording id so batch callers can
    report which input failed.
    """


class BackendContractViolation(ExporterError):
    """A backend returned output with the wrong shape, value set, or content."""
