"""Adapter that runs pretrained speech/text models and writes the JSONL
embedding and annotation files the screening pipelines ingest.

The screening package itself never imports this; the two meet only at the
file formats.
"""

from .errors import (
    AudioDecodeFailure,
    BackendContractViolation,
    DuplicateId,
    ExporterError,
    InvalidExportSpec,
    MalformedManifest,
    MissingField,
    ModelUnavailable,
)
from .export import export
from .spec import (
    ANNOTATION_KIND,
    AUDIO_KINDS,
    EXPORT_KINDS,
    KIND_DIMENSIONS,
    SPEECH_MAX_TOKENS,
    TEXT_MAX_TOKENS,
    ExportSpec,
)

__all__ = [
    "ANNOTATION_KIND",
    "AUDIO_KINDS",
    "AudioDecodeFailure",
    "BackendContractViolation",
    "DuplicateId",
    "EXPORT_KINDS",
    "ExportSpec",
    "ExporterError",
    "InvalidExportSpec",
    "KIND_DIMENSIONS",
    "MalformedManifest",
    "MissingField",
    "ModelUnavailable",
    "SPEECH_MAX_TOKENS",
    "TEXT_MAX_TOKENS",
    "export",
]

__version__ = "0.1.0"
