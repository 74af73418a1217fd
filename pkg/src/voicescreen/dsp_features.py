"""Voice-quality feature extraction: pitch, perturbation, spectral shape.

Everything here is computed from first principles on numpy arrays; no
external DSP dependency. The measures follow the common clinical
definitions: local jitter and shimmer over detected pitch periods,
autocorrelation-based harmonics-to-noise ratio, and a small set of
spectral balance descriptors. A recording is summarized by applying six
distribution functionals to each low-level descriptor track, plus two
categorical annotation slots, giving a fixed 56-entry vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import CANONICAL_RATE, WINDOW_HANN, WINDOW_RECT, FrameSeq, Signal, frame
from .errors import (
    EmptyTrack,
    InvalidInput,
    NonpositiveAmplitude,
    NoVoicedRegion,
    TooFewPeriods,
)

F0_MIN_HZ = 55.0
F0_MAX_HZ = 1000.0
VOICING_THRESHOLD = 0.45     # normalized autocorrelation peak
SILENCE_RMS = 1e-4           # frames below this RMS are gated out everywhere
LOUDNESS_FLOOR_DB = -80.0    # 20*log10(SILENCE_RMS)
HNR_MIN_DB = -10.0
HNR_MAX_DB = 40.0
SEMITONE_REF_HZ = 27.5

PITCH_FRAME_MS = 40.0
DESCRIPTOR_FRAME_MS = 25.0
HOP_MS = 10.0

_EPS = 1e-30


@dataclass(frozen=True)
class F0Track:
    """Framewise pitch estimate with voicing decisions.

    f0_hz is 0 where unvoiced; peak_corr keeps the interpolated
    normalized-autocorrelation peak for every frame (it feeds the HNR).
    """

    f0_hz: np.ndarray
    voiced: np.ndarray
    peak_corr: np.ndarray
    frame_len: int
    hop: int
    sample_rate: int

    def __post_init__(self):
        n = len(self.f0_hz)
        if len(self.voiced) != n or len(self.peak_corr) != n:
            raise InvalidInput("track arrays must share one length")

    @property
    def n_frames(self) -> int:
        return len(self.f0_hz)


@dataclass(frozen=True)
class PeriodTrack:
    """Detected pitch periods (samples) and their opening-peak amplitudes."""

    periods: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.periods) != len(self.amplitudes):
            raise InvalidInput("periods and amplitudes must align")

    def __len__(self) -> int:
        return len(self.periods)


def estimate_f0(fs: FrameSeq) -> F0Track:
    """Normalized-cross-correlation pitch with parabolic peak refinement.

    Requires frames of at least 40 ms so two cycles of the lowest target
    pitch (55 Hz) fit. A frame is voiced when its interpolated
    correlation peak reaches VOICING_THRESHOLD and its RMS clears the
    silence gate. Estimates are clamped to [55, 1000] Hz.
    """
    rate = fs.sample_rate
    if fs.frame_len < int(round(0.04 * rate)):
        raise InvalidInput("pitch frames must span at least 40 ms")
    lag_min = int(np.ceil(rate / F0_MAX_HZ))
    lag_max = int(np.floor(rate / F0_MIN_HZ))
    if lag_max + 1 >= fs.frame_len:
        raise InvalidInput("frame too short for the minimum pitch lag")

    x = fs.frames - fs.frames.mean(axis=1, keepdims=True)
    n, length = x.shape
    rms = np.sqrt(np.mean(fs.frames**2, axis=1))

    # Linear autocorrelation of every frame in one batch FFT.
    nfft = 1 << int(np.ceil(np.log2(length + lag_max + 2)))
    spec = np.fft.rfft(x, nfft, axis=1)
    raw = np.fft.irfft(spec * np.conj(spec), nfft, axis=1)[:, : lag_max + 2]

    # NCCF denominators from cumulative energies:
    #   e0(tau) = sum x[0 : L-tau]^2,  e1(tau) = sum x[tau : L]^2.
    csq = np.cumsum(x**2, axis=1)
    total = csq[:, -1][:, None]
    lags = np.arange(lag_max + 2)
    e0 = csq[:, length - 1 - lags]
    e1 = total - np.concatenate([np.zeros((n, 1)), csq[:, lags[1:] - 1]], axis=1)
    nccf = raw / np.sqrt(e0 * e1 + _EPS)

    band = nccf[:, lag_min : lag_max + 1]
    # A periodic signal peaks at every multiple of its period, so the raw
    # argmax can land on a subharmonic. Take the smallest-lag local max
    # within 85% of the global one: that is the fundamental.
    gmax = band.max(axis=1, keepdims=True)
    left = nccf[:, lag_min - 1 : lag_max]
    right = nccf[:, lag_min + 1 : lag_max + 2]
    is_peak = (band > left) & (band >= right) & (band >= 0.85 * gmax)
    has_peak = is_peak.any(axis=1)
    first_peak = np.argmax(is_peak, axis=1)
    best = np.where(has_peak, first_peak, np.argmax(band, axis=1)) + lag_min
    rows = np.arange(n)
    r0 = nccf[rows, best]
    rm = nccf[rows, best - 1]
    rp = nccf[rows, best + 1]
    denom = rm - 2.0 * r0 + rp
    delta = np.where(np.abs(denom) > 1e-12, 0.5 * (rm - rp) / np.where(denom == 0, 1, denom), 0.0)
    delta = np.clip(delta, -0.5, 0.5)
    peak = np.clip(r0 - 0.25 * (rm - rp) * delta, -1.0, 1.0)

    f0 = rate / (best + delta)
    f0 = np.clip(f0, F0_MIN_HZ, F0_MAX_HZ)
    voiced = (peak >= VOICING_THRESHOLD) & (rms >= SILENCE_RMS)
    f0 = np.where(voiced, f0, 0.0)
    peak = np.where(rms >= SILENCE_RMS, np.maximum(peak, 0.0), 0.0)
    return F0Track(f0, voiced, peak, fs.frame_len, fs.hop, rate)


def _parabolic_peak(mag: np.ndarray, m: int, lo: int, hi: int) -> tuple[float, float]:
    """Refine an integer argmax of |s| to a real position and height."""
    if m - 1 < lo or m + 1 >= hi:
        return float(m), float(mag[m])
    ym, y0, yp = mag[m - 1], mag[m], mag[m + 1]
    denom = ym - 2.0 * y0 + yp
    if denom >= -1e-30:
        return float(m), float(y0)
    delta = 0.5 * (ym - yp) / denom
    delta = float(np.clip(delta, -0.5, 0.5))
    height = y0 - 0.25 * (ym - yp) * delta
    return m + delta, float(height)


def period_analysis(s: Signal, track: F0Track) -> PeriodTrack:
    """Pick one pulse peak per pitch cycle and return period/amplitude runs.

    Within each voiced region the next peak is searched in a window
    0.75-1.25 periods ahead of the previous one, using the frame-local
    pitch estimate; positions and heights are refined parabolically so
    sub-sample periods are recovered. Periods never span across voiced
    regions. Raises NoVoicedRegion when the track has no voiced frame.
    """
    if not bool(track.voiced.any()):
        raise NoVoicedRegion("no voiced frames in pitch track")
    mag = np.abs(s.samples)
    n_samples = len(mag)
    hop, flen = track.hop, track.frame_len

    voiced = track.voiced.astype(int)
    edges = np.diff(np.concatenate([[0], voiced, [0]]))
    starts = np.where(edges == 1)[0]
    ends = np.where(edges == -1)[0]

    periods: list[float] = []
    amplitudes: list[float] = []
    for a, b in zip(starts, ends):
        span_lo = a * hop
        span_hi = min((b - 1) * hop + flen, n_samples)

        def f0_at(pos: float) -> float:
            idx = int(round((pos - flen / 2.0) / hop))
            idx = min(max(idx, a), b - 1)
            return float(track.f0_hz[idx])

        # Anchor on the strongest peak within the first frame span plus one
        # period: a region's opening frame may straddle leading silence, so
        # the very first cycles are skipped rather than trusted.
        t0 = track.sample_rate / f0_at(span_lo)
        first_hi = min(span_lo + flen + int(np.ceil(t0)) + 1, span_hi)
        if first_hi - span_lo < 2:
            continue
        m = span_lo + int(np.argmax(mag[span_lo:first_hi]))
        pos, amp = _parabolic_peak(mag, m, span_lo, span_hi)

        region_peaks = [(pos, amp)]
        while True:
            period = track.sample_rate / f0_at(pos)
            w_lo = int(np.ceil(pos + 0.75 * period))
            w_hi = int(np.floor(pos + 1.25 * period)) + 1
            w_lo, w_hi = max(w_lo, 0), min(w_hi, span_hi)
            if w_hi - w_lo < 1:
                break
            m = w_lo + int(np.argmax(mag[w_lo:w_hi]))
            pos, amp = _parabolic_peak(mag, m, span_lo, span_hi)
            region_peaks.append((pos, amp))

        # The first and last peaks press against the region boundary, where
        # one parabola neighbor can be near-silence and the refinement
        # overshoots; keep only peaks with genuine context on both sides.
        interior = region_peaks[1:-1]
        for (p0, a0), (p1, _a1) in zip(interior, interior[1:]):
            periods.append(p1 - p0)
            amplitudes.append(a0)

    return PeriodTrack(np.asarray(periods, dtype=np.float64), np.asarray(amplitudes, dtype=np.float64))


def jitter_local(track: PeriodTrack) -> float:
    """Mean absolute consecutive period difference over the mean period."""
    if len(track) < 2:
        raise TooFewPeriods("jitter needs at least two periods")
    d = np.abs(np.diff(track.periods))
    return float(d.mean() / track.periods.mean())


def shimmer_db(track: PeriodTrack) -> float:
    """Mean absolute dB ratio between consecutive period amplitudes."""
    if len(track) < 2:
        raise TooFewPeriods("shimmer needs at least two periods")
    if np.any(track.amplitudes <= 0):
        raise NonpositiveAmplitude("shimmer requires positive amplitudes")
    r = np.abs(20.0 * np.log10(track.amplitudes[1:] / track.amplitudes[:-1]))
    return float(r.mean())


def hnr_db(peak_corr: np.ndarray) -> np.ndarray:
    """Harmonics-to-noise ratio from the normalized autocorrelation peak."""
    r = np.clip(np.asarray(peak_corr, dtype=np.float64), 1e-10, 1.0 - 1e-10)
    return np.clip(10.0 * np.log10(r / (1.0 - r)), HNR_MIN_DB, HNR_MAX_DB)


def f0_semitones(f0_hz: np.ndarray) -> np.ndarray:
    """Pitch in semitones above 27.5 Hz (zero entries stay zero)."""
    f0 = np.asarray(f0_hz, dtype=np.float64)
    out = np.zeros_like(f0)
    pos = f0 > 0
    out[pos] = 12.0 * np.log2(f0[pos] / SEMITONE_REF_HZ)
    return out


def frame_descriptors(fs: FrameSeq, track: F0Track) -> dict[str, np.ndarray]:
    """Per-frame loudness, spectral shape, and HNR, index-aligned with track.

    Both sequences must share the hop so frame i refers to the same
    10 ms step; output length is the shorter of the two. Loudness is
    window-power compensated so a full-scale sine reads -3.01 dB under
    any analysis window, with a floor at -80 dB on silent frames, which
    also take floor/zero values for the spectral descriptors.
    """
    if fs.hop != track.hop:
        raise InvalidInput("descriptor frames and pitch track must share the hop")
    n = min(fs.n_frames, track.n_frames)
    frames = fs.frames[:n]
    length = fs.frame_len
    rate = fs.sample_rate

    win_power = float(np.mean(fs.window_values**2))
    rms = np.sqrt(np.mean(frames**2, axis=1)) / np.sqrt(win_power)
    loudness = 20.0 * np.log10(np.maximum(rms, SILENCE_RMS))

    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    freqs = np.fft.rfftfreq(length, d=1.0 / rate)
    total = power.sum(axis=1)
    live = rms >= SILENCE_RMS

    centroid = np.where(total > _EPS, (power * freqs).sum(axis=1) / np.maximum(total, _EPS), 0.0)

    lowband = freqs <= 500.0
    f_low = freqs[lowband]
    db_low = 10.0 * np.log10(power[:, lowband] + _EPS)
    f_c = f_low - f_low.mean()
    slope = (db_low * f_c).sum(axis=1) / (f_c**2).sum()

    def band_sum(lo, hi, lo_open=False):
        m = (freqs > lo if lo_open else freqs >= lo) & (freqs <= hi)
        return power[:, m].sum(axis=1)

    alpha = 10.0 * np.log10(band_sum(50.0, 1000.0) + _EPS) - 10.0 * np.log10(
        band_sum(1000.0, 5000.0, lo_open=True) + _EPS
    )

    def band_max(lo, hi, lo_open=False):
        m = (freqs > lo if lo_open else freqs >= lo) & (freqs <= hi)
        return power[:, m].max(axis=1)

    hammarberg = 10.0 * np.log10(band_max(0.0, 2000.0) + _EPS) - 10.0 * np.log10(
        band_max(2000.0, 5000.0, lo_open=True) + _EPS
    )

    zero = np.zeros(n)
    return {
        "loudness_dB": np.where(live, loudness, LOUDNESS_FLOOR_DB),
        "spectral_centroid_Hz": np.where(live, centroid, zero),
        "spectral_slope_0_500": np.where(live, slope, zero),
        "alpha_ratio_dB": np.where(live, alpha, zero),
        "hammarberg_dB": np.where(live, hammarberg, zero),
        "HNR_dB": hnr_db(track.peak_corr[:n]),
        "voiced": track.voiced[:n].copy(),
        "live": live,
    }


def erode_mask(mask: np.ndarray, k: int) -> np.ndarray:
    """Drop True entries within k positions of any False (array edges are
    not treated as False). Gates out frames that straddle a silence edge."""
    out = np.asarray(mask, dtype=bool).copy()
    base = out.copy()
    for shift in range(1, k + 1):
        out[shift:] &= base[:-shift]
        out[:-shift] &= base[shift:]
    return out


FUNCTIONAL_NAMES = ("mean", "std", "p20", "p50", "p80", "range_p20_p80")


def functionals(values: np.ndarray) -> dict[str, float]:
    """Six distribution summaries: mean, population std, three percentiles
    (linear interpolation at rank q*(n-1)), and the p80-p20 spread."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise EmptyTrack("functionals need at least one value")
    if not np.all(np.isfinite(v)):
        raise InvalidInput("track contains non-finite values")
    p20, p50, p80 = np.percentile(v, [20.0, 50.0, 80.0])
    # Shift by the first element before the spread computation: constant
    # tracks then give exactly 0, and large-offset tracks lose no precision.
    return {
        "mean": float(v.mean()),
        "std": float((v - v[0]).std()),
        "p20": float(p20),
        "p50": float(p50),
        "p80": float(p80),
        "range_p20_p80": float(p80 - p20),
    }


LLD_NAMES = (
    "F0_semitone",
    "loudness_dB",
    "jitter_local",
    "shimmer_dB",
    "HNR_dB",
    "spectral_centroid_Hz",
    "spectral_slope_0_500",
    "alpha_ratio_dB",
    "hammarberg_dB",
)
ANNOTATION_NAMES = ("emotion_id", "sentiment_id")
FEATURE_NAMES: tuple[str, ...] = tuple(
    f"{lld}_{fn}" for lld in LLD_NAMES for fn in FUNCTIONAL_NAMES
) + ANNOTATION_NAMES
N_FEATURES = len(FEATURE_NAMES)  # 56
REGISTRY_VERSION = "56f-v1"

EMOTION_IDS = {"anger": 0, "fear": 1, "joy": 2, "love": 3, "sadness": 4}
SENTIMENT_IDS = {"positive": 0, "negative": 1}


@dataclass(frozen=True)
class FeatureVector:
    """A recording summarized as the fixed 56-entry descriptor vector."""

    values: np.ndarray
    annotated: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (N_FEATURES,):
            raise InvalidInput(f"expected {N_FEATURES} features, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidInput("feature vector contains non-finite values")
        object.__setattr__(self, "values", v)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.values.tolist()))


def extract_feature_vector(s: Signal, annotations: tuple[int, int] | None = None) -> FeatureVector:
    """Full hand-crafted descriptor vector for one 16 kHz recording.

    Tracks are built at a common 10 ms hop: pitch on 40 ms rectangular
    frames, loudness/spectral shape on 25 ms Hann frames. Functional
    summaries run over live (non-silent) frames only, with pitch and HNR
    further restricted to voiced frames; jitter/shimmer functionals run
    over per-period-pair sequences whose means equal the scalar measures.
    A descriptor whose track is empty contributes zeros. annotations is
    an optional (emotion_id, sentiment_id) pair appended at the end.
    """
    if s.sample_rate != CANONICAL_RATE:
        raise InvalidInput(f"expected {CANONICAL_RATE} Hz input, got {s.sample_rate}")
    pitch_frames = frame(s, PITCH_FRAME_MS, HOP_MS, window=WINDOW_RECT)
    track = estimate_f0(pitch_frames)
    desc_frames = frame(s, DESCRIPTOR_FRAME_MS, HOP_MS, window=WINDOW_HANN)
    desc = frame_descriptors(desc_frames, track)

    # Frames whose span straddles a silence edge carry mixed content; gate
    # them from every functional track so values describe steady audio only.
    # A window of w samples at hop h overlaps an edge from up to
    # ceil(w/h) - 1 frames away. Longer pitch windows straddling the same
    # edge land on descriptor frames that are silent or themselves
    # straddling, so the descriptor radius covers both.
    k_straddle = int(np.ceil(desc_frames.frame_len / desc_frames.hop)) - 1
    live = erode_mask(desc["live"], k_straddle)
    voiced_live = desc["voiced"] & live

    tracks: dict[str, np.ndarray] = {
        "F0_semitone": f0_semitones(track.f0_hz[: len(voiced_live)][voiced_live]),
        "loudness_dB": desc["loudness_dB"][live],
        "HNR_dB": desc["HNR_dB"][voiced_live],
        "spectral_centroid_Hz": desc["spectral_centroid_Hz"][live],
        "spectral_slope_0_500": desc["spectral_slope_0_500"][live],
        "alpha_ratio_dB": desc["alpha_ratio_dB"][live],
        "hammarberg_dB": desc["hammarberg_dB"][live],
    }

    jitter_track = np.empty(0)
    shimmer_track = np.empty(0)
    if bool(track.voiced.any()):
        ptrack = period_analysis(s, track)
        if len(ptrack) >= 2:
            jitter_track = np.abs(np.diff(ptrack.periods)) / ptrack.periods.mean()
            if np.all(ptrack.amplitudes > 0):
                shimmer_track = np.abs(
                    20.0 * np.log10(ptrack.amplitudes[1:] / ptrack.amplitudes[:-1])
                )
    tracks["jitter_local"] = jitter_track
    tracks["shimmer_dB"] = shimmer_track

    values = np.zeros(N_FEATURES)
    for li, lld in enumerate(LLD_NAMES):
        tr = tracks[lld]
        if tr.size == 0:
            continue
        f = functionals(tr)
        for fi, fn in enumerate(FUNCTIONAL_NAMES):
            values[li * len(FUNCTIONAL_NAMES) + fi] = f[fn]

    annotated = annotations is not None
    if annotated:
        emo, sent = annotations
        if emo not in EMOTION_IDS.values():
            raise InvalidInput(f"emotion id {emo} outside 0..4")
        if sent not in SENTIMENT_IDS.values():
            raise InvalidInput(f"sentiment id {sent} outside 0..1")
        values[-2] = float(emo)
        values[-1] = float(sent)
    return FeatureVector(values, annotated=annotated)


def write_features_csv(path, rows: list[tuple[str, FeatureVector]]) -> None:
    """Feature matrix as CSV: id column plus the 56 registry columns."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("id",) + FEATURE_NAMES)
        for rec_id, fv in rows:
            writer.writerow([rec_id] + [repr(float(v)) for v in fv.values])


def read_features_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a feature CSV back; header must match the registry exactly."""
    import csv

    from .errors import MalformedLine

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedLine(f"{path}: empty file") from None
        if tuple(header) != ("id",) + FEATURE_NAMES:
            raise MalformedLine(f"{path}: header does not match the feature registry")
        ids: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != N_FEATURES + 1:
                raise MalformedLine(f"{path}:{lineno}: expected {N_FEATURES + 1} columns")
            ids.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc}") from None
    matrix = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, N_FEATURES))
    return ids, matrix
