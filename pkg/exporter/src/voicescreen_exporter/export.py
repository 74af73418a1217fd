"""The export operation: manifest in, one JSONL interchange file out.

Output files use the exact formats the screening pipelines ingest: embedding
kinds emit {"id", "vector"} lines, the annotation kind emits
{"id", "emotion", "sentiment"} lines, and both start with '# ' header
comments naming the export kind and the model checkpoint that produced the
file. Rows are written in manifest order, so a fixed manifest plus fixed
model weights gives a byte-identical file.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .audio import decode_wav
from .backends import load_default_backend
from .errors import BackendContractViolation, MissingField
from .manifest import ManifestRow, read_manifest
from .spec import (
    ANNOTATION_KIND,
    EMOTION_LABELS,
    MEAN_POOL_KINDS,
    SENTIMENT_LABELS,
    ExportSpec,
)

_FILE_FORMAT_VERSION = "jsonl-v1"


def export(spec: ExportSpec, backend=None) -> Path:
    """Run one export job and return the output path.

    backend defaults to the pretrained model for spec.kind (which must be
    available locally); tests and offline pipelines pass their own object
    with the same encode()/classify() surface.
    """
    rows = read_manifest(spec.manifest)
    if backend is None:
        backend = load_default_backend(spec.kind)
    out_path = Path(spec.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if spec.kind == ANNOTATION_KIND:
        lines = _annotation_lines(rows, backend)
    else:
        lines = _vector_lines(spec, rows, backend)
    header = (
        f"# kind: {spec.kind}; format: {_FILE_FORMAT_VERSION}\n"
        f"# model: {backend.model_id}\n"
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for line in lines:
            fh.write(line)
    return out_path


def _vector_lines(spec: ExportSpec, rows: list[ManifestRow], backend) -> list[str]:
    dim = spec.dimension
    cap = spec.max_tokens
    lines: list[str] = []
    for row in rows:
        if spec.consumes_audio:
            if not row.audio_path:
                raise MissingField(f"{row.id}: manifest row has no audio_path")
            samples, rate = decode_wav(row.audio_path, row.id)
            seq = backend.encode(samples, rate, max_frames=cap)
        else:
            if row.text is None:
                raise MissingField(f"{row.id}: manifest row has no text")
            seq = backend.encode(row.text, max_tokens=cap)
        seq = np.asarray(seq, dtype=np.float64)
        if seq.ndim != 2 or seq.shape[0] < 1:
            raise BackendContractViolation(
                f"{row.id}: backend returned shape {seq.shape}, expected (T, {dim})"
            )
        # Belt and braces: a backend that ignores the cap still gets clipped
        # before pooling, so the truncation rule holds for the output file.
        seq = seq[:cap]
        vector = seq.mean(axis=0) if spec.kind in MEAN_POOL_KINDS else seq[0]
        if vector.shape != (dim,):
            raise BackendContractViolation(
                f"{row.id}: backend produced dimension {vector.shape[0]}, "
                f"kind {spec.kind} is pinned to {dim}"
            )
        if not np.all(np.isfinite(vector)):
            raise BackendContractViolation(f"{row.id}: backend produced non-finite values")
        comps = ", ".join(format(float(v), ".9g") for v in vector)
        lines.append(f'{{"id": {json.dumps(row.id)}, "vector": [{comps}]}}\n')
    return lines


def _annotation_lines(rows: list[ManifestRow], backend) -> list[str]:
    lines: list[str] = []
    for row in rows:
        if row.text is None:
            raise MissingField(f"{row.id}: manifest row has no text")
        emotion, sentiment = backend.classify(row.text)
        if emotion not in EMOTION_LABELS:
            raise BackendContractViolation(f"{row.id}: unknown emotion label {emotion!r}")
        if sentiment not in SENTIMENT_LABELS:
            raise BackendContractViolation(f"{row.id}: unknown sentiment label {sentiment!r}")
        lines.append(
            json.dumps({"id": row.id, "emotion": emotion, "sentiment": sentiment}) + "\n"
        )
    return lines
