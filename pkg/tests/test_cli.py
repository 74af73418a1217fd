"""The config-driven command line: happy paths and exit codes."""

import json

import pytest

from voicescreen.cli import EXIT_CONFIG, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, main
from voicescreen.dataset import load_manifest, split_subsets


def _write_config(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture(scope="module")
def workdir(tiny_corpus, tmp_path_factory):
    """Extract features and split the shared corpus once for all CLI tests."""
    corpus_root, _entries = tiny_corpus
    root = tmp_path_factory.mktemp("cli")
    manifest = str(corpus_root / "manifest.jsonl")

    rc = main([
        "extract",
        "--config",
        _write_config(root / "extract.json", {"manifest": manifest, "out_dir": str(root / "feats")}),
    ])
    assert rc == EXIT_OK
    features = str(root / "feats" / "features.csv")

    rc = main([
        "split",
        "--config",
        _write_config(
            root / "split.json",
            {"manifest": manifest, "split_ratios": [0.7, 0.15, 0.15], "out_dir": str(root)},
        ),
        "--seed",
        "3",
    ])
    assert rc == EXIT_OK
    tagged = str(root / "manifest_split.jsonl")
    return {"root": root, "manifest": manifest, "features": features, "tagged": tagged}


def test_extract_writes_full_registry_csv(workdir, tiny_corpus):
    _, entries = tiny_corpus
    header, *rows = open(workdir["features"]).read().strip().splitlines()
    assert header.startswith("id,F0_semitone_mean,")
    assert len(rows) == len(entries)


def test_split_tags_partition(workdir, tiny_corpus):
    _, entries = tiny_corpus
    tagged = load_manifest(workdir["tagged"])
    assert len(tagged) == len(entries)
    groups = split_subsets(tagged)
    assert sum(len(v) for v in groups.values()) == len(entries)
    assert all(len(v) > 0 for v in groups.values())


def test_synth_then_extract_round_trip(tmp_path):
    synth_cfg = {
        "n": 6,
        "seed": 2,
        "base": {"f0_mean": 220.0, "jitter_pct": 1.0, "shimmer_pct": 3.0, "snr_db": 30.0},
        "class1_effect": {"f0_shift_semitones": 4.0},
        "duration_range_s": [0.5, 0.7],
        "out_dir": str(tmp_path / "data"),
    }
    assert main(["synth", "--config", _write_config(tmp_path / "s.json", synth_cfg)]) == EXIT_OK
    entries = load_manifest(tmp_path / "data" / "manifest.jsonl")
    assert len(entries) == 6
    assert all((tmp_path / "data" / e.audio_path).exists() for e in entries)


def test_train_eval_cycle(workdir, tmp_path):
    model_path = str(tmp_path / "model.json")
    train_cfg = {
        "pipeline": "hand_crafted",
        "manifest": workdir["tagged"],
        "out_dir": str(tmp_path / "out"),
        "features_csv": workdir["features"],
        "model_out": model_path,
        "fit": {"l1_lambda": 0.01},
    }
    assert main(["train", "--config", _write_config(tmp_path / "t.json", train_cfg)]) == EXIT_OK

    eval_cfg = {
        "pipeline": "hand_crafted",
        "model": model_path,
        "manifest": workdir["tagged"],
        "out_dir": str(tmp_path / "evaldir"),
        "features_csv": workdir["features"],
    }
    assert main(["eval", "--config", _write_config(tmp_path / "e.json", eval_cfg)]) == EXIT_OK
    doc = json.loads((tmp_path / "evaldir" / "eval.json").read_text())
    assert {"auroc", "precision", "recall", "f1"} <= set(doc)
    assert 0.0 <= doc["auroc"] <= 1.0


def test_run_prints_table_and_writes_report(workdir, tmp_path, capsys):
    run_cfg = {
        "manifest": workdir["tagged"],
        "out_dir": str(tmp_path / "out"),
        "pipelines": ["random_baseline", "hand_crafted"],
        "features_csv": workdir["features"],
    }
    assert main(["run", "--config", _write_config(tmp_path / "r.json", run_cfg)]) == EXIT_OK
    shown = capsys.readouterr().out
    assert "Random baseline" in shown and "Audio features" in shown
    assert (tmp_path / "out" / "report.json").exists()
    assert (tmp_path / "out" / "report.md").exists()


def test_importance_ranks_features(workdir, tmp_path, capsys):
    model_path = str(tmp_path / "model.json")
    train_cfg = {
        "pipeline": "hand_crafted",
        "manifest": workdir["tagged"],
        "out_dir": str(tmp_path / "out"),
        "features_csv": workdir["features"],
        "model_out": model_path,
    }
    assert main(["train", "--config", _write_config(tmp_path / "t.json", train_cfg)]) == EXIT_OK
    imp_cfg = {
        "model": model_path,
        "features_csv": workdir["features"],
        "out_dir": str(tmp_path / "imp"),
    }
    assert main(["importance", "--config", _write_config(tmp_path / "i.json", imp_cfg)]) == EXIT_OK
    capsys.readouterr()
    lines = (tmp_path / "imp" / "importance.csv").read_text().strip().splitlines()
    assert lines[0] == "feature,importance"
    assert len(lines) == 57
    scores = [abs(float(l.split(",")[1])) for l in lines[1:]]
    assert scores == sorted(scores, reverse=True)


def test_seed_flag_controls_split(workdir, tmp_path):
    def split_with_seed(seed, out):
        out.mkdir()
        cfg = {
            "manifest": workdir["manifest"],
            "split_ratios": [0.7, 0.15, 0.15],
            "out_dir": str(out),
        }
        assert main(["split", "--config", _write_config(out / "s.json", cfg), "--seed", str(seed)]) == EXIT_OK
        return (out / "manifest_split.jsonl").read_text()

    a = split_with_seed(1, tmp_path / "a")
    b = split_with_seed(1, tmp_path / "b")
    c = split_with_seed(2, tmp_path / "c")
    assert a == b
    assert a != c


# ---------- exit codes ----------

def test_missing_config_file_is_input_error(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert "missing.json" in capsys.readouterr().err


def test_unparseable_config_is_config_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("not json")
    assert main(["run", "--config", str(p)]) == EXIT_CONFIG
    capsys.readouterr()


def test_unknown_config_key_is_config_error(workdir, tmp_path, capsys):
    cfg = {
        "manifest": workdir["tagged"],
        "out_dir": str(tmp_path / "x"),
        "pipelines": ["hand_crafted"],
        "features_csv": workdir["features"],
        "typo_field": 1,
    }
    assert main(["run", "--config", _write_config(tmp_path / "c.json", cfg)]) == EXIT_CONFIG
    capsys.readouterr()


def test_missing_manifest_is_input_error(workdir, tmp_path, capsys):
    cfg = {
        "manifest": str(tmp_path / "nope.jsonl"),
        "out_dir": str(tmp_path / "x"),
        "pipelines": ["hand_crafted"],
        "features_csv": workdir["features"],
    }
    assert main(["run", "--config", _write_config(tmp_path / "c.json", cfg)]) == EXIT_INPUT
    capsys.readouterr()


def test_single_class_training_is_numeric_error(workdir, tiny_corpus, tmp_path, capsys):
    # reuse ids that exist in the features CSV but force one label
    _, entries = tiny_corpus
    ids = [e.id for e in entries if e.gad7 <= 4]
    rows = []
    for i, rec_id in enumerate(ids):
        split = "train" if i < len(ids) - 2 else ("valid" if i == len(ids) - 2 else "test")
        rows.append({"id": rec_id, "gad7": 2, "split": split})
    path = tmp_path / "single.jsonl"
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    cfg = {
        "manifest": str(path),
        "out_dir": str(tmp_path / "x"),
        "pipelines": ["hand_crafted"],
        "features_csv": workdir["features"],
    }
    assert main(["run", "--config", _write_config(tmp_path / "c.json", cfg)]) == EXIT_NUMERIC
    capsys.readouterr()
