"""Command-line entry points for the experiment harness.

Subcommands: synth, extract, split, train, eval, run, importance. Each
reads a JSON config (--config); --seed and --out override the config's
primary seed and output directory. Exit codes: 0 success, 2 config
error, 3 input error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import dataset as ds
from . import errors as err
from . import metrics
from . import pipeline as pl
from . import synth as sy
from .dsp_features import FEATURE_NAMES, N_FEATURES
from .learners import FitConfig, feature_importance, load_model, predict_scores

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

_CONFIG_ERRORS = (err.ConfigError, err.InvalidInput)
_INPUT_ERRORS = (
    err.MissingInput,
    err.MalformedContainer,
    err.UnsupportedEncoding,
    err.EmptyAudio,
    err.MalformedLine,
    err.DuplicateId,
    err.EmptyFile,
    err.MissingId,
    err.ScoreOutOfRange,
    err.DimensionMismatch,
    err.IoFailure,
    FileNotFoundError,
)
_NUMERIC_ERRORS = (
    err.SingleClass,
    err.NoPositives,
    err.NonFiniteValue,
    err.EmptyTrack,
    err.EmptySequence,
    err.TooFewPeriods,
    err.NoVoicedRegion,
    err.SignalTooShort,
    err.EmptyClass,
    err.NonpositiveWeight,
    err.NonpositiveAmplitude,
)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise err.MissingInput(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise err.ConfigError(f"{path}: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(obj, dict):
        raise err.ConfigError(f"{path}: config must be a JSON object")
    return obj


def _out_dir(cfg: dict, args) -> str:
    out = args.out or cfg.get("out_dir")
    if not out:
        raise err.ConfigError("no output directory (--out or config out_dir)")
    os.makedirs(out, exist_ok=True)
    return out


def _dataclass_from(cls, obj: dict, what: str):
    try:
        return cls(**obj)
    except TypeError as exc:
        raise err.ConfigError(f"{what}: {exc}") from None


def cmd_synth(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(cfg, args)
    cfg.pop("out_dir", None)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if "base" in cfg:
        cfg["base"] = _dataclass_from(sy.VoiceSpec, cfg["base"], "base")
    if "class1_effect" in cfg:
        cfg["class1_effect"] = _dataclass_from(
            sy.ClassEffect, cfg["class1_effect"], "class1_effect"
        )
    for key in ("duration_range_s", "class0_score_range", "class1_score_range"):
        if key in cfg:
            cfg[key] = tuple(cfg[key])
    spec = _dataclass_from(sy.SynthDatasetSpec, cfg, "synth config")
    entries = sy.synth_dataset(spec, out)
    print(f"wrote {len(entries)} recordings + manifest.jsonl to {out}")
    return EXIT_OK


def cmd_extract(args) -> int:
    from .dsp_features import write_features_csv

    cfg = _load_config(args.config)
    out = _out_dir(cfg, args)
    manifest = cfg.get("manifest")
    if not manifest:
        raise err.ConfigError("extract needs a manifest path in the config")
    entries = ds.load_manifest(manifest)
    exp = pl.ExperimentConfig(
        manifest=manifest, out_dir=out, annotations=cfg.get("annotations")
    )
    feats = pl.load_features(exp, entries)
    rows = [(e.id, _as_feature_vector(feats.records[e.id])) for e in entries]
    path = os.path.join(out, "features.csv")
    write_features_csv(path, rows)
    print(f"wrote {len(rows)} feature rows to {path}")
    return EXIT_OK


def _as_feature_vector(values: np.ndarray):
    from .dsp_features import FeatureVector

    return FeatureVector(values)


def cmd_split(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(cfg, args)
    manifest = cfg.get("manifest")
    if not manifest:
        raise err.ConfigError("split needs a manifest path in the config")
    ratios = tuple(cfg.get("split_ratios", ds.DEFAULT_SPLIT_RATIOS))
    seed = args.seed if args.seed is not None else cfg.get("split_seed", 0)
    entries = ds.load_manifest(manifest)
    tagged = ds.stratified_split(entries, ratios, seed)
    path = os.path.join(out, "manifest_split.jsonl")
    ds.write_manifest(path, tagged)
    counts = {name: len(rows) for name, rows in ds.split_subsets(tagged).items()}
    print(f"wrote {path} with splits {counts}")
    return EXIT_OK


def _single_pipeline_config(cfg: dict, args) -> tuple[pl.ExperimentConfig, str]:
    name = cfg.pop("pipeline", None)
    if name is None:
        raise err.ConfigError("config needs a pipeline name")
    if name == "random_baseline" or name not in pl.PIPELINE_ORDER:
        raise err.ConfigError(f"pipeline must be a trainable one, got {name!r}")
    fit = cfg.pop("fit", None)
    if fit is not None:
        cfg.setdefault("fit_overrides", {})[name] = fit
    cfg["pipelines"] = [name]
    if args.out:
        cfg["out_dir"] = args.out
    if args.seed is not None:
        cfg["split_seed"] = args.seed
    return pl.config_from_dict(cfg), name


def cmd_train(args) -> int:
    cfg_dict = _load_config(args.config)
    model_out = cfg_dict.pop("model_out", None)
    exp, name = _single_pipeline_config(cfg_dict, args)
    os.makedirs(exp.out_dir, exist_ok=True)
    report = pl.run_experiment(exp)
    result = report.results[0]
    from .learners import save_model

    path = model_out or os.path.join(exp.out_dir, f"{name}_model.json")
    save_model(path, result.model)
    chosen = dataclasses.asdict(result.chosen_config)
    print(f"trained {name} (config {chosen}); model saved to {path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg_dict = _load_config(args.config)
    model_path = cfg_dict.pop("model", None)
    if not model_path:
        raise err.ConfigError("eval needs a model path in the config")
    exp, name = _single_pipeline_config(cfg_dict, args)
    os.makedirs(exp.out_dir, exist_ok=True)
    model = load_model(model_path)

    entries = ds.load_manifest(exp.manifest)
    if any(e.split is None for e in entries):
        rows = entries
    else:
        rows = ds.split_subsets(entries)["test"]
    rep = pl.representation_for(exp, name, entries)
    from .embeddings import join_with_manifest

    joined = join_with_manifest(rep, rows, strict=True)
    scores = predict_scores(model, joined.matrix)
    threshold = pl.THRESHOLD_FOR_KIND[model.kind]
    report = metrics.classification_report(scores, joined.labels, threshold)

    out_path = os.path.join(exp.out_dir, "eval.json")
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump({"pipeline": name, "n": len(rows), **report.as_dict()}, fh, indent=1)
        fh.write("\n")
    if 0 < joined.labels.sum() < len(joined.labels):
        metrics.write_curve_csv(
            os.path.join(exp.out_dir, f"{name}_roc.csv"),
            metrics.roc_curve(scores, joined.labels),
        )
    if joined.labels.sum() > 0:
        metrics.write_curve_csv(
            os.path.join(exp.out_dir, f"{name}_pr.csv"),
            metrics.pr_curve(scores, joined.labels),
        )
    print(
        f"{name}: precision {report.precision:.2f} recall {report.recall:.2f} "
        f"f1 {report.f1:.2f} auroc {report.auroc:.2f} (n={len(rows)})"
    )
    return EXIT_OK


def cmd_run(args) -> int:
    cfg_dict = _load_config(args.config)
    if args.out:
        cfg_dict["out_dir"] = args.out
    if args.seed is not None:
        cfg_dict["split_seed"] = args.seed
    exp = pl.config_from_dict(cfg_dict)
    report = pl.run_experiment(exp)
    written = pl.emit_report(report, exp.out_dir)
    print(pl.render_markdown_table(report), end="")
    print(f"wrote {len(written)} files under {exp.out_dir}")
    return EXIT_OK


def cmd_importance(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(cfg, args)
    model_path = cfg.get("model")
    features_csv = cfg.get("features_csv")
    if not model_path or not features_csv:
        raise err.ConfigError("importance needs model and features_csv in the config")
    model = load_model(model_path)
    from .dsp_features import read_features_csv

    _, matrix = read_features_csv(features_csv)
    names = FEATURE_NAMES if model.n_features == N_FEATURES else None
    ranking = feature_importance(model, matrix, names)

    path = os.path.join(out, "importance.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature,importance\n")
        for name, score in ranking:
            fh.write(f"{name},{score!r}\n")
    for name, score in ranking[:10]:
        print(f"{score:10.6f}  {name}")
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voicescreen",
        description="Speech-based anxiety screening experiment harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "synth": (cmd_synth, "generate a synthetic labeled corpus"),
        "extract": (cmd_extract, "extract acoustic features to CSV"),
        "split": (cmd_split, "assign stratified train/valid/test tags"),
        "train": (cmd_train, "train one pipeline and save its model"),
        "eval": (cmd_eval, "evaluate a saved model on the test split"),
        "run": (cmd_run, "run pipelines end to end and emit reports"),
        "importance": (cmd_importance, "rank features of a linear model"),
    }
    for name, (fn, help_text) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the primary seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
