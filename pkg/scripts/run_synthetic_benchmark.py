#!/usr/bin/env python3
"""Run the two synthetic end-to-end benchmarks and print their AUROCs.

The first builds an audible corpus whose positive class sits 4 semitones
higher and screens it with the hand-crafted feature pipeline. The second
builds 512-d vectors whose class means differ by 1.0 in three coordinates
and screens them with the RBF-SVM embedding pipeline. Both are the same
constructions the acceptance gate pins, so this script is the quick way to
eyeball them outside pytest.
"""

import argparse
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from voicescreen.dataset import ManifestEntry, write_manifest
from voicescreen.embeddings import EmbeddingSet, write_embedding_file
from voicescreen.pipeline import ExperimentConfig, run_experiment
from voicescreen.synth import ClassEffect, SynthDatasetSpec, VoiceSpec, synth_dataset


def bench_hand_crafted(root: Path) -> tuple[float, float]:
    t0 = time.perf_counter()
    spec = SynthDatasetSpec(
        n=200,
        seed=1234,
        base=VoiceSpec(f0_mean=220.0, jitter_pct=1.0, shimmer_pct=3.0, snr_db=30.0),
        class1_effect=ClassEffect(f0_shift_semitones=4.0),
        duration_range_s=(1.0, 2.0),
    )
    synth_dataset(spec, root / "audio")
    cfg = ExperimentConfig(
        manifest=str(root / "audio" / "manifest.jsonl"),
        out_dir=str(root / "audio_out"),
        pipelines=("hand_crafted",),
        split_seed=0,
    )
    result = run_experiment(cfg).results[0]
    return result.report.auroc, time.perf_counter() - t0


def bench_wav2vec(root: Path) -> tuple[float, float]:
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    entries, records = [], {}
    for i in range(2000):
        rec_id = f"e{i:04d}"
        label = i % 2
        entries.append(ManifestEntry(id=rec_id, gad7=2 if label == 0 else 12))
        v = np.zeros(512)
        v[:3] = rng.standard_normal(3)
        if label == 1:
            v[:3] += 1.0
        records[rec_id] = v
    write_manifest(root / "emb_manifest.jsonl", entries)
    write_embedding_file(root / "wav512.jsonl", EmbeddingSet(dimension=512, records=records))
    cfg = ExperimentConfig(
        manifest=str(root / "emb_manifest.jsonl"),
        out_dir=str(root / "emb_out"),
        pipelines=("wav2vec_embed",),
        audio_embeddings=str(root / "wav512.jsonl"),
        split_seed=0,
    )
    result = run_experiment(cfg).results[0]
    return result.report.auroc, time.perf_counter() - t0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--work-dir", default=None, help="keep intermediates here instead of a temp dir")
    args = parser.parse_args(argv)

    if args.work_dir:
        root = Path(args.work_dir)
        root.mkdir(parents=True, exist_ok=True)
        ctx = None
    else:
        ctx = tempfile.TemporaryDirectory(prefix="voicescreen_bench_")
        root = Path(ctx.name)

    try:
        rows = [
            ("hand_crafted (f0 +4 st, n=200)", *bench_hand_crafted(root), 0.90),
            ("wav2vec_embed (3-coord shift, n=2000)", *bench_wav2vec(root), 0.85),
        ]
    finally:
        if ctx is not None:
            ctx.cleanup()

    print(f"{'benchmark':<40} {'auroc':>7} {'floor':>7} {'time':>8}")
    all_ok = True
    for name, auc, dt, floor in rows:
        ok = auc >= floor
        all_ok = all_ok and ok
        print(f"{name:<40} {auc:>7.4f} {floor:>7.2f} {dt:>7.1f}s  {'ok' if ok else 'BELOW FLOOR'}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
