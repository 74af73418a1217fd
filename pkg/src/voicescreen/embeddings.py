"""Ingestion of precomputed representation files.

Transcript and audio embeddings arrive as JSONL produced offline (the
encoder models are too heavy to run here); this module validates and
joins them with the manifest. Lines starting with '#' are treated as
header comments so exported files can carry provenance notes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import ManifestEntry
from .dsp_features import EMOTION_IDS, SENTIMENT_IDS
from .errors import (
    DimensionMismatch,
    DuplicateId,
    EmptyFile,
    EmptySequence,
    InvalidInput,
    MalformedLine,
    MissingId,
    NonFiniteValue,
)


@dataclass(frozen=True)
class EmbeddingSet:
    """Fixed-dimension vectors keyed by recording id (insertion-ordered)."""

    dimension: int
    records: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, rec_id: str) -> bool:
        return rec_id in self.records


def load_embedding_file(path) -> EmbeddingSet:
    """Parse {"id", "vector"} JSONL; all vectors must share one dimension."""
    records: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc.msg}") from None
            if not isinstance(obj, dict) or "id" not in obj or "vector" not in obj:
                raise MalformedLine(f"{path}:{lineno}: need object with id and vector")
            rec_id = obj["id"]
            if not isinstance(rec_id, str) or not rec_id:
                raise MalformedLine(f"{path}:{lineno}: id must be a non-empty string")
            if rec_id in records:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rec_id!r}")
            vec = obj["vector"]
            if not isinstance(vec, list) or not vec or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in vec
            ):
                raise MalformedLine(f"{path}:{lineno}: vector must be a non-empty number list")
            arr = np.asarray(vec, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise NonFiniteValue(f"{path}:{lineno}: vector has non-finite entries")
            if dimension is None:
                dimension = len(arr)
            elif len(arr) != dimension:
                raise DimensionMismatch(
                    f"{path}:{lineno}: vector length {len(arr)} != {dimension}"
                )
            records[rec_id] = arr
    if not records:
        raise EmptyFile(f"{path}: no embedding records")
    return EmbeddingSet(dimension=int(dimension), records=records)


def write_embedding_file(path, records, header: str | None = None) -> None:
    """Write vectors as JSONL at nine significant digits per component.

    records may be an EmbeddingSet or any id -> vector mapping.
    """
    if isinstance(records, EmbeddingSet):
        records = records.records
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for rec_id, vec in records.items():
            comps = ", ".join(format(float(v), ".9g") for v in np.asarray(vec).ravel())
            fh.write(f'{{"id": {json.dumps(rec_id)}, "vector": [{comps}]}}\n')


def mean_pool(frames: np.ndarray) -> np.ndarray:
    """Column mean over a (T, d) frame-level representation."""
    arr = np.asarray(frames, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise EmptySequence("mean pooling needs a non-empty (T, d) array")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("frame representation has non-finite entries")
    return arr.mean(axis=0)


def concat_modalities(text_vec: np.ndarray, speech_vec: np.ndarray) -> np.ndarray:
    """Fuse per-recording vectors by concatenation, text block first."""
    t = np.asarray(text_vec, dtype=np.float64).ravel()
    s = np.asarray(speech_vec, dtype=np.float64).ravel()
    if t.size == 0 or s.size == 0:
        raise InvalidInput("both modality vectors must be non-empty")
    return np.concatenate([t, s])


@dataclass(frozen=True)
class JoinResult:
    """Design matrix aligned to manifest order plus bookkeeping."""

    matrix: np.ndarray
    labels: np.ndarray
    entries: list[ManifestEntry]
    n_missing: int


def join_with_manifest(
    emb: EmbeddingSet, entries: list[ManifestEntry], strict: bool = True
) -> JoinResult:
    """Stack vectors in manifest order with the binary labels.

    strict=True raises MissingId on the first manifest id absent from the
    embedding set; strict=False drops those rows and reports the count.
    """
    rows: list[np.ndarray] = []
    kept: list[ManifestEntry] = []
    n_missing = 0
    for e in entries:
        vec = emb.records.get(e.id)
        if vec is None:
            if strict:
                raise MissingId(f"id {e.id!r} missing from embedding set")
            n_missing += 1
            continue
        rows.append(vec)
        kept.append(e)
    matrix = np.vstack(rows) if rows else np.empty((0, emb.dimension))
    labels = np.asarray([e.label for e in kept], dtype=np.int64)
    return JoinResult(matrix=matrix, labels=labels, entries=kept, n_missing=n_missing)


def load_annotation_file(path) -> dict[str, tuple[int, int]]:
    """Parse emotion/sentiment JSONL into id -> (emotion_id, sentiment_id)."""
    out: dict[str, tuple[int, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc.msg}") from None
            if (
                not isinstance(obj, dict)
                or not isinstance(obj.get("id"), str)
                or "emotion" not in obj
                or "sentiment" not in obj
            ):
                raise MalformedLine(f"{path}:{lineno}: need id, emotion, sentiment")
            if obj["id"] in out:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {obj['id']!r}")
            emotion, sentiment = obj["emotion"], obj["sentiment"]
            if emotion not in EMOTION_IDS:
                raise MalformedLine(f"{path}:{lineno}: unknown emotion {emotion!r}")
            if sentiment not in SENTIMENT_IDS:
                raise MalformedLine(f"{path}:{lineno}: unknown sentiment {sentiment!r}")
            out[obj["id"]] = (EMOTION_IDS[emotion], SENTIMENT_IDS[sentiment])
    return out
