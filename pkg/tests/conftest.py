"""Shared fixtures: deterministic signals and a small on-disk corpus.

Everything expensive is session-scoped; individual tests must not mutate
fixture state.
"""

import numpy as np
import pytest

from voicescreen.audio_io import CANONICAL_RATE, Signal, frame, WINDOW_RECT
from voicescreen.dsp_features import HOP_MS, PITCH_FRAME_MS, estimate_f0
from voicescreen.synth import ClassEffect, SynthDatasetSpec, VoiceSpec, synth_dataset, synth_voice_with_truth


def pitch_track(sig: Signal):
    return estimate_f0(frame(sig, PITCH_FRAME_MS, HOP_MS, window=WINDOW_RECT))


# The acceptance gate registers one verdict per criterion here; the summary
# hook replays them after the test run so the lines survive output capture.
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_VERDICTS:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sine220():
    t = np.arange(CANONICAL_RATE) / CANONICAL_RATE
    return Signal(0.9 * np.sin(2 * np.pi * 220.0 * t), CANONICAL_RATE)


@pytest.fixture(scope="session")
def white_noise():
    rng = np.random.default_rng(0)
    return Signal(rng.uniform(-0.9, 0.9, CANONICAL_RATE), CANONICAL_RATE)


@pytest.fixture(scope="session")
def jitter_sweep():
    """signal + realized truth for jitter_pct in {0, 2, 5}, same seed."""
    out = {}
    for j in (0.0, 2.0, 5.0):
        spec = VoiceSpec(f0_mean=220.0, jitter_pct=j, duration_s=1.0, seed=11)
        out[j] = synth_voice_with_truth(spec)
    return out


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """24 short labeled recordings with a +4 semitone class shift, on disk."""
    root = tmp_path_factory.mktemp("corpus")
    spec = SynthDatasetSpec(
        n=24,
        seed=9,
        base=VoiceSpec(f0_mean=220.0, jitter_pct=1.0, shimmer_pct=3.0, snr_db=30.0),
        class1_effect=ClassEffect(f0_shift_semitones=4.0),
        duration_range_s=(0.8, 1.2),
    )
    entries = synth_dataset(spec, root)
    return root, entries
