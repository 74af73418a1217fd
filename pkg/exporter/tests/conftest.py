"""Shared fixtures: a tiny on-disk corpus plus deterministic stand-in backends.

The stand-ins implement the same encode()/classify() surface as the
pretrained backends but derive their output from a checksum of the input, so
exports are reproducible without any model weights.
"""

from __future__ import annotations

import json
import wave
import zlib
from pathlib import Path

import numpy as np
import pytest


class StubVectorBackend:
    """Deterministic (T, d) sequences seeded from the input content.

    Works for both input types: encode() accepts either (samples, rate) or
    (text,) plus the truncation cap, and records every cap it was given so
    tests can assert the forwarded limits.
    """

    def __init__(self, dim: int, model_id: str = "stub-encoder r7") -> None:
        self.dim = dim
        self.model_id = model_id
        self.caps_seen: list[int] = []

    def _sequence(self, seed: int, n_rows: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.standard_normal((n_rows, self.dim))

    def encode(self, *args, max_frames: int | None = None, max_tokens: int | None = None):
        cap = max_frames if max_frames is not None else max_tokens
        self.caps_seen.append(cap)
        first = args[0]
        if isinstance(first, str):
            seed = zlib.crc32(first.encode("utf-8"))
            n_rows = min(cap, max(1, len(first.split())))
        else:
            samples = np.asarray(first, dtype=np.float64)
            seed = zlib.crc32(samples.tobytes())
            n_rows = min(cap, max(1, samples.size // 160))
        return self._sequence(seed, n_rows)


class FixedVectorBackend:
    """Returns one pinned matrix for every input; for pooling-rule tests."""

    def __init__(self, matrix: np.ndarray, model_id: str = "fixed-encoder") -> None:
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.model_id = model_id

    def encode(self, *args, **kwargs) -> np.ndarray:
        return self.matrix


class StubAnnotationBackend:
    model_id = "stub-annotator r7"
    _EMOTIONS = ("anger", "fear", "joy", "love", "sadness")

    def classify(self, text: str) -> tuple[str, str]:
        digest = zlib.crc32(text.encode("utf-8"))
        emotion = self._EMOTIONS[digest % 5]
        sentiment = "positive" if digest % 2 == 0 else "negative"
        return emotion, sentiment


def write_pcm16_wav(path: Path, freq_hz: float, duration_s: float = 0.25,
                    rate: int = 16000) -> None:
    t = np.arange(int(duration_s * rate)) / rate
    x = 0.6 * np.sin(2.0 * np.pi * freq_hz * t)
    pcm = np.round(x * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(rate)
        wav.writeframes(pcm.tobytes())


@pytest.fixture(scope="module")
def corpus(tmp_path_factory) -> tuple[Path, list[str]]:
    """Three recordings with audio and transcripts; returns (manifest, ids)."""
    root = tmp_path_factory.mktemp("corpus")
    ids = ["r001", "r002", "r003"]
    texts = [
        "today was mostly fine although the morning felt rushed",
        "I could not sleep again and everything feels heavy",
        " ".join(f"word{i}" for i in range(600)),  # longer than the text cap
    ]
    lines = ["# tiny export corpus"]
    for rec_id, freq, text in zip(ids, (180.0, 220.0, 260.0), texts):
        wav_path = root / f"{rec_id}.wav"
        write_pcm16_wav(wav_path, freq)
        lines.append(json.dumps({
            "id": rec_id,
            "gad7": 3,
            "audio_path": str(wav_path),
            "text": text,
        }))
    manifest = root / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest, ids
