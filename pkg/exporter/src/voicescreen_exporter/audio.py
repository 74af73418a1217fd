"""WAV decoding for the audio-consuming backends.

Uses the stdlib wave module (PCM only) rather than pulling in an audio
dependency; the corpus files here are plain PCM16 mono/stereo WAVs. Any
container or format problem surfaces as AudioDecodeFailure carrying the
recording id, so a batch export can name the offending input.
"""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from .errors import AudioDecodeFailure


def decode_wav(path: str | Path, rec_id: str) -> tuple[np.ndarray, int]:
    """Read a PCM16 WAV as float64 mono samples in [-1, 1) plus its rate."""
    try:
        with wave.open(str(path), "rb") as wav:
            sample_width = wav.getsampwidth()
            n_channels = wav.getnchannels()
            rate = wav.getframerate()
            n_frames = wav.getnframes()
            payload = wav.readframes(n_frames)
    except (wave.Error, OSError, EOFError) as exc:
        raise AudioDecodeFailure(f"{rec_id}: cannot decode {path}: {exc}") from None
    if sample_width != 2:
        raise AudioDecodeFailure(
            f"{rec_id}: {path} has sample width {sample_width}, only PCM16 is supported"
        )
    if rate <= 0 or n_channels < 1:
        raise AudioDecodeFailure(f"{rec_id}: {path} has a malformed format header")
    samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    if n_channels > 1:
        usable = (samples.size // n_channels) * n_channels
        samples = samples[:usable].reshape(-1, n_channels).mean(axis=1)
    if samples.size == 0:
        raise AudioDecodeFailure(f"{rec_id}: {path} contains no samples")
    return samples, rate
