"""Experiment runner: the five screening pipelines plus a random baseline.

Each pipeline maps a representation to a learner:

  random_baseline     seeded uniform scores, no training
  hand_crafted        56 acoustic/annotation features -> L1 logistic regression
  text_embed          transcript embeddings (768-d)   -> gradient boosting
  text_embed_weighted same, with severity weights (score+1)/22 on training rows
  wav2vec_embed       audio embeddings (512-d)        -> RBF SVM
  multimodal          text CLS (1024) + speech CLS (768), concatenated -> RBF SVM

Models train on the train split, small hyperparameter grids are scored by
validation AUROC, and all reported numbers come from the test split. Every
step is seeded, so a config maps to byte-identical reports.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import dataset as ds
from .audio_io import CANONICAL_RATE, read_wav, resample
from .dsp_features import (
    FEATURE_NAMES,
    N_FEATURES,
    REGISTRY_VERSION,
    extract_feature_vector,
    read_features_csv,
)
from .embeddings import (
    EmbeddingSet,
    concat_modalities,
    join_with_manifest,
    load_annotation_file,
    load_embedding_file,
)
from .errors import ConfigError, IoFailure, MissingId, MissingInput
from .learners import (
    FitConfig,
    TrainedModel,
    fit_gbc,
    fit_logreg_l1,
    fit_svm_rbf,
    predict_scores,
    save_model,
)
from .metrics import (
    EvalReport,
    auroc,
    classification_report,
    pr_curve,
    roc_curve,
    write_curve_csv,
)

PIPELINE_ORDER = (
    "random_baseline",
    "hand_crafted",
    "text_embed",
    "text_embed_weighted",
    "wav2vec_embed",
    "multimodal",
)

_LEARNER_FOR = {
    "hand_crafted": "logreg_l1",
    "text_embed": "gbc",
    "text_embed_weighted": "gbc",
    "wav2vec_embed": "svm_rbf",
    "multimodal": "svm_rbf",
}

# Probability-scale models threshold at 0.5; margin-scale at 0.
THRESHOLD_FOR_KIND = {"logreg_l1": 0.5, "gbc": 0.5, "svm_rbf": 0.0, "random": 0.5}


def default_grid(kind: str) -> tuple[FitConfig, ...]:
    """Small fixed per-family grids, scored on the validation split."""
    if kind == "logreg_l1":
        return tuple(FitConfig(l1_lambda=lam) for lam in (1e-4, 1e-3, 1e-2, 1e-1, 1.0))
    if kind == "svm_rbf":
        return tuple(FitConfig(C=c) for c in (1.0, 10.0, 100.0))
    if kind == "gbc":
        return tuple(FitConfig(n_trees=n) for n in (50, 100, 200))
    raise ConfigError(f"no grid for learner kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved run description; every field lands in the report echo."""

    manifest: str
    out_dir: str
    pipelines: tuple[str, ...] = ("all",)
    features_csv: str | None = None
    annotations: str | None = None
    text_embeddings: str | None = None
    audio_embeddings: str | None = None
    text_cls_embeddings: str | None = None
    speech_cls_embeddings: str | None = None
    split_ratios: tuple[float, float, float] = ds.DEFAULT_SPLIT_RATIOS
    split_seed: int = 0
    baseline_seed: int = 0
    fit_overrides: dict = field(default_factory=dict)

    def resolved_pipelines(self) -> tuple[str, ...]:
        requested = self.pipelines
        if requested == ("all",) or requested == ["all"]:
            return PIPELINE_ORDER
        unknown = [p for p in requested if p not in PIPELINE_ORDER]
        if unknown:
            raise ConfigError(f"unknown pipeline(s): {unknown}")
        # Canonical report order regardless of request order.
        return tuple(p for p in PIPELINE_ORDER if p in requested)

    def validate(self) -> None:
        self.resolved_pipelines()
        if len(self.split_ratios) != 3:
            raise ConfigError("split_ratios must have three entries")
        for name in self.fit_overrides:
            if name not in PIPELINE_ORDER:
                raise ConfigError(f"fit_overrides for unknown pipeline {name!r}")


def config_from_dict(obj: dict) -> ExperimentConfig:
    """Build a config from parsed JSON, rejecting unknown keys."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "manifest" not in obj or "out_dir" not in obj:
        raise ConfigError("config needs manifest and out_dir")
    kwargs = dict(obj)
    if "pipelines" in kwargs:
        kwargs["pipelines"] = tuple(kwargs["pipelines"])
    if "split_ratios" in kwargs:
        kwargs["split_ratios"] = tuple(kwargs["split_ratios"])
    if "fit_overrides" in kwargs:
        overrides = {}
        for name, params in (kwargs["fit_overrides"] or {}).items():
            if not isinstance(params, dict):
                raise ConfigError(f"fit_overrides[{name!r}] must be an object")
            try:
                overrides[name] = FitConfig(**params)
            except TypeError as exc:
                raise ConfigError(f"fit_overrides[{name!r}]: {exc}") from None
        kwargs["fit_overrides"] = overrides
    try:
        cfg = ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def config_echo(cfg: ExperimentConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["pipelines"] = list(cfg.resolved_pipelines())
    echo["split_ratios"] = list(cfg.split_ratios)
    echo["fit_overrides"] = {
        name: dataclasses.asdict(fc) for name, fc in cfg.fit_overrides.items()
    }
    return echo


@dataclass
class PipelineResult:
    """Everything one pipeline produced; emit_report serializes it."""

    name: str
    report: EvalReport
    scores: np.ndarray
    labels: np.ndarray
    model: TrainedModel | None
    chosen_config: FitConfig | None
    grid_log: list[dict]
    input_dim: int
    split_sizes: dict[str, int]


@dataclass
class RunReport:
    config: dict
    registry_version: str
    results: list[PipelineResult]


def _require_file(path: str | None, what: str) -> str:
    if path is None:
        raise MissingInput(f"{what} is required but not configured")
    if not os.path.exists(path):
        raise MissingInput(f"{what} not found: {path}")
    return path


def load_features(cfg: ExperimentConfig, entries: list[ds.ManifestEntry]) -> EmbeddingSet:
    """Acoustic feature matrix as an embedding set keyed by id."""
    if cfg.features_csv is not None:
        _require_file(cfg.features_csv, "features_csv")
        ids, matrix = read_features_csv(cfg.features_csv)
        return EmbeddingSet(dimension=N_FEATURES, records={i: row for i, row in zip(ids, matrix)})

    annotations = None
    if cfg.annotations is not None:
        annotations = load_annotation_file(_require_file(cfg.annotations, "annotations"))
    records: dict[str, np.ndarray] = {}
    for e in entries:
        if e.audio_path is None:
            raise MissingInput(
                f"entry {e.id!r} has no audio_path and no features_csv was given"
            )
        _require_file(e.audio_path, f"audio for {e.id!r}")
        s = read_wav(e.audio_path)
        if s.sample_rate != CANONICAL_RATE:
            s = resample(s, CANONICAL_RATE)
        ann = None
        if annotations is not None:
            if e.id not in annotations:
                raise MissingId(f"id {e.id!r} missing from annotation file")
            ann = annotations[e.id]
        records[e.id] = extract_feature_vector(s, ann).values
    return EmbeddingSet(dimension=N_FEATURES, records=records)


def _concat_sets(text: EmbeddingSet, speech: EmbeddingSet, ids: list[str]) -> EmbeddingSet:
    records: dict[str, np.ndarray] = {}
    for rec_id in ids:
        if rec_id not in text.records:
            raise MissingId(f"id {rec_id!r} missing from text CLS embeddings")
        if rec_id not in speech.records:
            raise MissingId(f"id {rec_id!r} missing from speech CLS embeddings")
        records[rec_id] = concat_modalities(text.records[rec_id], speech.records[rec_id])
    return EmbeddingSet(dimension=text.dimension + speech.dimension, records=records)


def representation_for(cfg: ExperimentConfig, name: str, entries) -> EmbeddingSet:
    if name == "hand_crafted":
        return load_features(cfg, entries)
    if name in ("text_embed", "text_embed_weighted"):
        return load_embedding_file(_require_file(cfg.text_embeddings, "text_embeddings"))
    if name == "wav2vec_embed":
        return load_embedding_file(_require_file(cfg.audio_embeddings, "audio_embeddings"))
    if name == "multimodal":
        text = load_embedding_file(
            _require_file(cfg.text_cls_embeddings, "text_cls_embeddings")
        )
        speech = load_embedding_file(
            _require_file(cfg.speech_cls_embeddings, "speech_cls_embeddings")
        )
        return _concat_sets(text, speech, [e.id for e in entries])
    raise ConfigError(f"unknown pipeline {name!r}")


_FITTERS = {"logreg_l1": fit_logreg_l1, "svm_rbf": fit_svm_rbf, "gbc": fit_gbc}


def run_experiment(cfg: ExperimentConfig, fitters: dict | None = None) -> RunReport:
    """Execute the configured pipelines and collect test-split reports.

    fitters optionally overrides the kind -> fit function mapping (used by
    tests to probe what a pipeline passes to its learner).
    """
    cfg.validate()
    fit_by_kind = dict(_FITTERS)
    if fitters:
        fit_by_kind.update(fitters)

    entries = ds.load_manifest(_require_file(cfg.manifest, "manifest"))
    if any(e.split is None for e in entries):
        entries = ds.stratified_split(entries, cfg.split_ratios, cfg.split_seed)
    subsets = ds.split_subsets(entries)
    split_sizes = {name: len(rows) for name, rows in subsets.items()}

    results: list[PipelineResult] = []
    for name in cfg.resolved_pipelines():
        if name == "random_baseline":
            results.append(_run_random_baseline(cfg, subsets["test"], split_sizes))
            continue

        kind = _LEARNER_FOR[name]
        rep = representation_for(cfg, name, entries)
        joined = {
            split: join_with_manifest(rep, rows, strict=True)
            for split, rows in subsets.items()
        }
        train = joined["train"]
        weights = None
        if name == "text_embed_weighted":
            weights = np.asarray([e.weight for e in train.entries])

        if name in cfg.fit_overrides:
            grid = (cfg.fit_overrides[name],)
        else:
            grid = default_grid(kind)

        fit = fit_by_kind[kind]
        grid_log: list[dict] = []
        best = None
        for candidate in grid:
            model = fit(train.matrix, train.labels, weights, candidate)
            if len(grid) == 1:
                best = (candidate, model, None)
                break
            valid = joined["valid"]
            v_scores = predict_scores(model, valid.matrix)
            v_auc = auroc(v_scores, valid.labels)
            grid_log.append({"config": dataclasses.asdict(candidate), "valid_auroc": v_auc})
            if best is None or v_auc > best[2]:
                best = (candidate, model, v_auc)
        chosen_config, model, _ = best

        test = joined["test"]
        scores = predict_scores(model, test.matrix)
        report = classification_report(scores, test.labels, THRESHOLD_FOR_KIND[kind])
        results.append(
            PipelineResult(
                name=name,
                report=report,
                scores=scores,
                labels=test.labels,
                model=model,
                chosen_config=chosen_config,
                grid_log=grid_log,
                input_dim=rep.dimension,
                split_sizes=split_sizes,
            )
        )

    return RunReport(
        config=config_echo(cfg), registry_version=REGISTRY_VERSION, results=results
    )


def _run_random_baseline(cfg, test_rows, split_sizes) -> PipelineResult:
    rng = np.random.default_rng(cfg.baseline_seed)
    scores = rng.uniform(0.0, 1.0, size=len(test_rows))
    labels = np.asarray([e.label for e in test_rows], dtype=np.int64)
    report = classification_report(scores, labels, THRESHOLD_FOR_KIND["random"])
    return PipelineResult(
        name="random_baseline",
        report=report,
        scores=scores,
        labels=labels,
        model=None,
        chosen_config=None,
        grid_log=[],
        input_dim=0,
        split_sizes=split_sizes,
    )


def _result_row(r: PipelineResult) -> dict:
    row = {
        "pipeline": r.name,
        **r.report.as_dict(),
        "input_dim": r.input_dim,
        "split_sizes": r.split_sizes,
        "chosen_config": dataclasses.asdict(r.chosen_config) if r.chosen_config else None,
        "grid_log": r.grid_log,
    }
    return row


def emit_report(report: RunReport, out_dir) -> list[str]:
    """Write report.json/report.md, per-pipeline curves, and model files.

    Output is a pure function of the RunReport: re-emitting produces
    byte-identical files. Returns the written paths.
    """
    out = os.fspath(out_dir)
    written: list[str] = []
    try:
        os.makedirs(out, exist_ok=True)
        doc = {
            "config": report.config,
            "registry_version": REGISTRY_VERSION,
            "feature_names": list(FEATURE_NAMES),
            "results": [_result_row(r) for r in report.results],
        }
        json_path = os.path.join(out, "report.json")
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        written.append(json_path)

        md_path = os.path.join(out, "report.md")
        with open(md_path, "w", encoding="utf-8") as fh:
            fh.write(render_markdown_table(report))
        written.append(md_path)

        curve_dir = os.path.join(out, "curves")
        os.makedirs(curve_dir, exist_ok=True)
        model_dir = os.path.join(out, "models")
        os.makedirs(model_dir, exist_ok=True)
        for r in report.results:
            if 0 < r.labels.sum() < len(r.labels):
                roc_path = os.path.join(curve_dir, f"{r.name}_roc.csv")
                write_curve_csv(roc_path, roc_curve(r.scores, r.labels))
                written.append(roc_path)
            if r.labels.sum() > 0:
                pr_path = os.path.join(curve_dir, f"{r.name}_pr.csv")
                write_curve_csv(pr_path, pr_curve(r.scores, r.labels))
                written.append(pr_path)
            if r.model is not None:
                model_path = os.path.join(model_dir, f"{r.name}.json")
                save_model(model_path, r.model)
                written.append(model_path)
    except OSError as exc:
        raise IoFailure(f"failed writing report to {out}: {exc}") from exc
    return written


_DISPLAY_NAMES = {
    "random_baseline": "Random baseline",
    "hand_crafted": "Audio features",
    "text_embed": "Transcript embedding",
    "text_embed_weighted": "Transcript embedding + weights",
    "wav2vec_embed": "Audio embedding",
    "multimodal": "Multi-modal",
}


def render_markdown_table(report: RunReport) -> str:
    """Aligned markdown table, one row per pipeline, 2-decimal values."""
    header = ("Model", "Precision", "Recall", "F1", "AUROC")
    rows = [
        (
            _DISPLAY_NAMES[r.name],
            f"{r.report.precision:.2f}",
            f"{r.report.recall:.2f}",
            f"{r.report.f1:.2f}",
            f"{r.report.auroc:.2f}",
        )
        for r in report.results
    ]
    widths = [
        max(len(header[c]), *(len(row[c]) for row in rows)) if rows else len(header[c])
        for c in range(len(header))
    ]

    def fmt(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |\n"

    lines = [fmt(header), "|" + "|".join("-" * (w + 2) for w in widths) + "|\n"]
    lines.extend(fmt(row) for row in rows)
    return "".join(lines)
