"""WAV decoding, resampling, and framing.

Everything downstream consumes mono float64 signals at a canonical 16 kHz,
produced here. The decoder is a self-contained RIFF parser (PCM 16-bit and
IEEE float 32-bit only), so decoding behaviour is identical on every
platform. The resampler is a 64-tap Kaiser-windowed sinc interpolator with
fixed parameters, chosen so outputs are reproducible bit-for-bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptyAudio,
    InvalidInput,
    MalformedContainer,
    SignalTooShort,
    UnsupportedEncoding,
)

CANONICAL_RATE = 16_000

# Fixed resampler design: 64 taps, Kaiser beta 8.6 (about 90 dB stopband).
RESAMPLE_TAPS = 64
RESAMPLE_KAISER_BETA = 8.6

WINDOW_RECT = "rect"
WINDOW_HANN = "hann"

_PCM = 1
_IEEE_FLOAT = 3


@dataclass(frozen=True)
class Signal:
    """Mono sample sequence with its sample rate.

    samples: 1-D float64 array, nominally within [-1, 1], all finite.
    sample_rate: Hz, positive.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidInput("Signal samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise InvalidInput("Signal samples must all be finite")
        if int(self.sample_rate) <= 0:
            raise InvalidInput("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class FrameSeq:
    """Equal-length windowed frames cut from a Signal.

    frames[i] starts at sample i * hop of the source signal; the stored
    values already include the analysis window. A trailing partial frame
    is never kept, so len(frames) == floor((N - frame_len) / hop) + 1.
    """

    frames: np.ndarray
    frame_len: int
    hop: int
    sample_rate: int
    window: str = WINDOW_RECT
    window_values: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.hop < 1:
            raise InvalidInput("hop must be >= 1 sample")
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[1] != self.frame_len:
            raise InvalidInput("frames must be n x frame_len")
        object.__setattr__(self, "frames", frames)
        if self.window_values is None:
            object.__setattr__(self, "window_values", _window(self.window, self.frame_len))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def frame_times(self) -> np.ndarray:
        """Start time of each frame in seconds."""
        return np.arange(self.n_frames) * self.hop / self.sample_rate


def _window(kind: str, length: int) -> np.ndarray:
    if kind == WINDOW_RECT:
        return np.ones(length)
    if kind == WINDOW_HANN:
        if length == 1:
            return np.ones(1)
        n = np.arange(length)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / (length - 1))
    raise InvalidInput(f"unknown window kind: {kind!r}")


def read_wav(path) -> Signal:
    """Decode a RIFF/WAVE file to a mono Signal.

    Supports PCM 16-bit and IEEE float 32-bit, 1 or 2 channels. 16-bit
    samples are scaled by 1/32768; stereo is downmixed by per-sample
    channel mean. Float samples are clipped to [-1, 1].
    """
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedContainer(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedContainer(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise MalformedContainer(f"{path}: truncated data chunk")
            data = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or data is None:
        raise MalformedContainer(f"{path}: missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if n_channels not in (1, 2):
        raise UnsupportedEncoding(f"{path}: {n_channels} channels unsupported")
    if audio_format == _PCM and bits == 16:
        values = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == _IEEE_FLOAT and bits == 32:
        values = np.frombuffer(data, dtype="<f4").astype(np.float64)
        values = np.clip(values, -1.0, 1.0)
    else:
        raise UnsupportedEncoding(
            f"{path}: format {audio_format} / {bits}-bit unsupported"
        )

    if n_channels == 2:
        values = values[: 2 * (len(values) // 2)].reshape(-1, 2).mean(axis=1)
    if len(values) == 0:
        raise EmptyAudio(f"{path}: no samples")
    return Signal(values, sample_rate)


def write_wav(path, s: Signal) -> None:
    """Encode a Signal as mono 16-bit PCM WAV.

    Quantization is round(x * 32768) clamped to int16, the inverse of the
    decoder's 1/32768 scaling, so decode -> encode round trips are exact.
    """
    ints = np.clip(np.round(s.samples * 32768.0), -32768, 32767).astype("<i2")
    body = ints.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(body)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, _PCM, 1, s.sample_rate, s.sample_rate * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(body))
    Path(path).write_bytes(header + body)


def _kaiser_sinc(offsets: np.ndarray, cutoff: float) -> np.ndarray:
    """Continuous Kaiser-windowed sinc evaluated at fractional tap offsets."""
    half = RESAMPLE_TAPS / 2.0
    x = offsets / half
    window = np.zeros_like(offsets)
    inside = np.abs(x) <= 1.0
    window[inside] = np.i0(RESAMPLE_KAISER_BETA * np.sqrt(1.0 - x[inside] ** 2))
    window /= np.i0(RESAMPLE_KAISER_BETA)
    return cutoff * np.sinc(cutoff * offsets) * window


def resample(s: Signal, target_rate: int) -> Signal:
    """Band-limited rate conversion by windowed-sinc interpolation.

    Output length is round(N * target / source). When target == source the
    input samples are returned unchanged. Downsampling lowers the sinc
    cutoff to the target Nyquist to suppress aliasing.
    """
    if target_rate <= 0:
        raise InvalidInput("target_rate must be positive")
    if target_rate == s.sample_rate:
        return Signal(s.samples.copy(), target_rate)

    n_in = len(s.samples)
    n_out = int(round(n_in * target_rate / s.sample_rate))
    if n_in == 0 or n_out == 0:
        return Signal(np.zeros(0), target_rate)

    ratio = s.sample_rate / target_rate  # input samples per output sample
    cutoff = min(1.0, target_rate / s.sample_rate)
    half = RESAMPLE_TAPS // 2

    positions = np.arange(n_out) * ratio
    base = np.floor(positions).astype(np.int64)
    taps = np.arange(-half + 1, half + 1)  # 64 taps around the position
    indices = base[:, None] + taps[None, :]
    offsets = positions[:, None] - indices
    coeffs = _kaiser_sinc(offsets, cutoff)

    padded = np.concatenate([np.zeros(half), s.samples, np.zeros(half + 1)])
    gathered = padded[indices + half]
    out = np.einsum("ij,ij->i", gathered, coeffs)
    if cutoff < 1.0:
        # Renormalize so a DC input keeps unit gain after cutoff scaling.
        out /= np.sum(_kaiser_sinc(np.arange(-half + 1, half + 1, dtype=float), cutoff))
    return Signal(out, target_rate)


def frame(s: Signal, frame_len_ms: float, hop_ms: float, window: str = WINDOW_RECT) -> FrameSeq:
    """Slice a Signal into overlapping windowed frames.

    Frame i covers samples [i*hop, i*hop + frame_len); the trailing partial
    frame is dropped. Raises SignalTooShort when the signal cannot fill one
    frame.
    """
    if not (frame_len_ms >= hop_ms > 0):
        raise InvalidInput("need frame_len_ms >= hop_ms > 0")
    frame_len = int(round(frame_len_ms * s.sample_rate / 1000.0))
    hop = int(round(hop_ms * s.sample_rate / 1000.0))
    n = len(s.samples)
    if n < frame_len:
        raise SignalTooShort(f"signal of {n} samples shorter than one {frame_len}-sample frame")
    n_frames = (n - frame_len) // hop + 1
    starts = np.arange(n_frames) * hop
    idx = starts[:, None] + np.arange(frame_len)[None, :]
    w = _window(window, frame_len)
    return FrameSeq(
        frames=s.samples[idx] * w,
        frame_len=frame_len,
        hop=hop,
        sample_rate=s.sample_rate,
        window=window,
        window_values=w,
    )
