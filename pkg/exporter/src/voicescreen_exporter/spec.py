"""Export job description: which model family, over which manifest, to where.

Each kind is pinned to the representation it stands for: the vector
dimension, whether the model consumes audio or transcript text, and how a
per-recording vector is reduced from the frame/token sequence. Pooling over
audio frames happens here in the exporter (column mean over the z-level
sequence); text kinds keep the first-token (CLS) row. The one non-embedding
kind, emotion_sentiment, emits categorical annotations instead of vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidExportSpec

# kind -> output vector dimension. Fixed; a backend that disagrees is broken.
KIND_DIMENSIONS: dict[str, int] = {
    "wav2vec_z_mean": 512,
    "sentence_text": 768,
    "roberta_cls_text": 1024,
    "speech_roberta_cls": 768,
}

# The only kind that emits annotations (emotion + sentiment labels), not vectors.
ANNOTATION_KIND = "emotion_sentiment"

EXPORT_KINDS: tuple[str, ...] = (*KIND_DIMENSIONS, ANNOTATION_KIND)

# Kinds whose model consumes the waveform; every other kind consumes the
# manifest row's transcript text.
AUDIO_KINDS: frozenset[str] = frozenset({"wav2vec_z_mean", "speech_roberta_cls"})

# Kinds reduced by mean pooling over the returned frame sequence. The rest
# of the vector kinds take the first row (CLS / first-token position).
MEAN_POOL_KINDS: frozenset[str] = frozenset({"wav2vec_z_mean"})

# Maximum sequence lengths forwarded to the backends: long recordings are
# truncated to this many speech frames / text tokens before encoding.
SPEECH_MAX_TOKENS = 2048
TEXT_MAX_TOKENS = 512

EMOTION_LABELS: frozenset[str] = frozenset({"anger", "fear", "joy", "love", "sadness"})
SENTIMENT_LABELS: frozenset[str] = frozenset({"positive", "negative"})


@dataclass(frozen=True)
class ExportSpec:
    """One export job: manifest in, one JSONL file out.

    manifest: path to a recording manifest (JSONL, one object per line,
        with an "id" field plus "audio_path" and/or "text" as inputs).
    kind: one of EXPORT_KINDS.
    output: path the JSONL file is written to.
    """

    manifest: str | Path
    kind: str
    output: str | Path

    def __post_init__(self) -> None:
        if self.kind not in EXPORT_KINDS:
            known = ", ".join(EXPORT_KINDS)
            raise InvalidExportSpec(f"unknown kind {self.kind!r}; expected one of: {known}")
        if not str(self.manifest):
            raise InvalidExportSpec("manifest path is empty")
        if not str(self.output):
            raise InvalidExportSpec("output path is empty")

    @property
    def dimension(self) -> int | None:
        """Pinned vector width, or None for the annotation kind."""
        return KIND_DIMENSIONS.get(self.kind)

    @property
    def consumes_audio(self) -> bool:
        return self.kind in AUDIO_KINDS

    @property
    def max_tokens(self) -> int:
        return SPEECH_MAX_TOKENS if self.consumes_audio else TEXT_MAX_TOKENS
