"""Synthetic voice generator: ground truth bookkeeping and recoverability."""

import numpy as np
import pytest

from conftest import pitch_track
from voicescreen.audio_io import CANONICAL_RATE, read_wav
from voicescreen.dsp_features import (
    DESCRIPTOR_FRAME_MS,
    HOP_MS,
    WINDOW_HANN,
    frame,
    frame_descriptors,
)
from voicescreen.errors import InvalidSpec
from voicescreen.synth import (
    ClassEffect,
    SynthDatasetSpec,
    VoiceSpec,
    synth_dataset,
    synth_voice,
    synth_voice_with_truth,
)

RATE = CANONICAL_RATE


def test_synth_deterministic():
    spec = VoiceSpec(f0_mean=220.0, jitter_pct=2.0, shimmer_pct=4.0, snr_db=25.0, seed=3)
    a = synth_voice(spec)
    b = synth_voice(spec)
    assert np.array_equal(a.samples, b.samples)


def test_synth_seed_changes_noise():
    a = synth_voice(VoiceSpec(jitter_pct=2.0, seed=1))
    b = synth_voice(VoiceSpec(jitter_pct=2.0, seed=2))
    assert not np.array_equal(a.samples, b.samples)


def test_synth_peak_normalized():
    sig = synth_voice(VoiceSpec(f0_mean=220.0, seed=0))
    assert np.abs(sig.samples).max() == pytest.approx(0.9, abs=1e-9)


def test_synth_length_completes_last_cycle():
    spec = VoiceSpec(f0_mean=220.0, duration_s=1.0, seed=0)
    n = len(synth_voice(spec).samples)
    period = RATE / 220.0
    assert RATE <= n <= RATE + int(np.ceil(period)) + 1


def test_synth_f0_recoverable():
    sig = synth_voice(VoiceSpec(f0_mean=300.0, duration_s=1.0, seed=4))
    track = pitch_track(sig)
    med = np.median(track.f0_hz[track.voiced])
    assert med == pytest.approx(300.0, rel=0.02)


def test_truth_onsets_and_periods_consistent():
    _, truth = synth_voice_with_truth(VoiceSpec(jitter_pct=3.0, seed=5))
    assert np.allclose(np.diff(truth.onsets), truth.periods[:-1])
    assert truth.amplitudes.shape == truth.periods.shape
    assert np.all(truth.amplitudes > 0)


def test_truth_jitter_tracks_knob():
    # the perturbation scale is calibrated so jitter_local reads back the
    # knob value; a finite sample wanders a little around it
    _, t2 = synth_voice_with_truth(VoiceSpec(jitter_pct=2.0, duration_s=1.0, seed=11))
    assert 0.015 <= t2.jitter_local() <= 0.025
    _, t5 = synth_voice_with_truth(VoiceSpec(jitter_pct=5.0, duration_s=1.0, seed=11))
    assert 0.04 <= t5.jitter_local() <= 0.06
    _, t0 = synth_voice_with_truth(VoiceSpec(jitter_pct=0.0, duration_s=1.0, seed=11))
    assert t0.jitter_local() == 0.0


def test_hnr_follows_snr_knob():
    def median_voiced_hnr(snr_db):
        sig = synth_voice(VoiceSpec(f0_mean=220.0, snr_db=snr_db, duration_s=1.0, seed=9))
        track = pitch_track(sig)
        fs = frame(sig, DESCRIPTOR_FRAME_MS, HOP_MS, window=WINDOW_HANN)
        desc = frame_descriptors(fs, track)
        n = len(desc["HNR_dB"])
        mask = track.voiced[:n] & desc["live"][:n]
        return float(np.median(desc["HNR_dB"][mask])) if mask.any() else -10.0

    assert median_voiced_hnr(40.0) >= 25.0
    assert median_voiced_hnr(0.0) <= 8.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"f0_mean": 54.0},
        {"f0_mean": 1001.0},
        {"jitter_pct": -0.1},
        {"jitter_pct": 50.0},
        {"shimmer_pct": 100.0},
        {"duration_s": 0.0},
        {"n_harmonics": 0},
    ],
)
def test_voice_spec_validation(kwargs):
    with pytest.raises(InvalidSpec):
        VoiceSpec(**kwargs)


def _tiny_spec(**over):
    kw = dict(
        n=8,
        seed=4,
        base=VoiceSpec(f0_mean=220.0, jitter_pct=1.0, shimmer_pct=3.0, snr_db=30.0),
        class1_effect=ClassEffect(f0_shift_semitones=4.0),
        duration_range_s=(0.5, 0.8),
    )
    kw.update(over)
    return SynthDatasetSpec(**kw)


def test_dataset_spec_validation():
    with pytest.raises(InvalidSpec):
        _tiny_spec(n=3)
    with pytest.raises(InvalidSpec):
        _tiny_spec(duration_range_s=(0.8, 0.5))
    with pytest.raises(InvalidSpec):
        _tiny_spec(class0_score_range=(0, 6))
    with pytest.raises(InvalidSpec):
        _tiny_spec(class1_score_range=(4, 21))


def test_dataset_balance_and_scores():
    entries, signals = synth_dataset(_tiny_spec())
    assert len(entries) == 8 and len(signals) == 8
    labels = [e.label for e in entries]
    assert labels.count(0) == labels.count(1) == 4
    for e in entries:
        lo, hi = (0, 4) if e.label == 0 else (5, 21)
        assert lo <= e.gad7 <= hi
    assert len({e.id for e in entries}) == 8


def test_dataset_deterministic():
    a_entries, a_signals = synth_dataset(_tiny_spec())
    b_entries, b_signals = synth_dataset(_tiny_spec())
    assert [e.gad7 for e in a_entries] == [e.gad7 for e in b_entries]
    first = a_entries[0].id
    assert np.array_equal(a_signals[first].samples, b_signals[first].samples)


def test_dataset_class_effect_shifts_f0():
    spec = _tiny_spec(f0_spread_semitones=0.0, duration_range_s=(1.0, 1.0))
    entries, signals = synth_dataset(spec)

    def med_f0(e):
        track = pitch_track(signals[e.id])
        return float(np.median(track.f0_hz[track.voiced]))

    f0_0 = np.mean([med_f0(e) for e in entries if e.label == 0])
    f0_1 = np.mean([med_f0(e) for e in entries if e.label == 1])
    assert f0_1 / f0_0 == pytest.approx(2.0 ** (4.0 / 12.0), rel=0.02)


def test_dataset_writes_corpus(tiny_corpus):
    root, entries = tiny_corpus
    manifest = root / "manifest.jsonl"
    assert manifest.exists()
    assert len(entries) == 24
    for e in entries[:4]:
        assert e.audio_path is not None
        sig = read_wav(root / e.audio_path)
        assert sig.sample_rate == RATE
        assert len(sig.samples) > 0
