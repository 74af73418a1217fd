"""Screening-score handling: manifests, labels, weights, stratified splits."""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateId,
    EmptyClass,
    InvalidInput,
    MalformedLine,
    ScoreOutOfRange,
)

GAD7_MIN, GAD7_MAX = 0, 21
SPLIT_NAMES = ("train", "valid", "test")
DEFAULT_SPLIT_RATIOS = (0.70, 0.15, 0.15)


class AnxietyLevel(enum.IntEnum):
    """Severity buckets over the 0-21 screening total."""

    NONE = 0
    MILD = 1
    MODERATE = 2
    SEVERE = 3


def gad7_bucket(score: int) -> AnxietyLevel:
    """Map a 0-21 total to its severity bucket (0-4 / 5-9 / 10-14 / 15-21)."""
    if not isinstance(score, (int, np.integer)) or isinstance(score, bool):
        raise ScoreOutOfRange(f"score must be an integer, got {score!r}")
    if not GAD7_MIN <= score <= GAD7_MAX:
        raise ScoreOutOfRange(f"score {score} outside {GAD7_MIN}..{GAD7_MAX}")
    if score <= 4:
        return AnxietyLevel.NONE
    if score <= 9:
        return AnxietyLevel.MILD
    if score <= 14:
        return AnxietyLevel.MODERATE
    return AnxietyLevel.SEVERE


def binarize(level: AnxietyLevel) -> int:
    """Binary screening target: any non-none severity counts as positive."""
    return 0 if level == AnxietyLevel.NONE else 1


def label_for_score(score: int) -> int:
    return binarize(gad7_bucket(score))


def sample_weight(score: int) -> float:
    """Severity-proportional training weight (score + 1) / 22."""
    gad7_bucket(score)  # range check
    return (score + 1) / 22.0


@dataclass(frozen=True)
class ManifestEntry:
    """One recording row: id, screening total, optional path and split tag."""

    id: str
    gad7: int
    audio_path: str | None = None
    split: str | None = None

    def __post_init__(self):
        if not self.id:
            raise InvalidInput("entry id must be non-empty")
        gad7_bucket(self.gad7)
        if self.split is not None and self.split not in SPLIT_NAMES:
            raise InvalidInput(f"split must be one of {SPLIT_NAMES}, got {self.split!r}")

    @property
    def label(self) -> int:
        return label_for_score(self.gad7)

    @property
    def weight(self) -> float:
        return sample_weight(self.gad7)


def load_manifest(path) -> list[ManifestEntry]:
    """Read a manifest JSONL file; '#' comment lines and blanks are skipped."""
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc.msg}") from None
            if not isinstance(obj, dict) or "id" not in obj or "gad7" not in obj:
                raise MalformedLine(f"{path}:{lineno}: need object with id and gad7")
            rec_id = obj["id"]
            if not isinstance(rec_id, str):
                raise MalformedLine(f"{path}:{lineno}: id must be a string")
            if rec_id in seen:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            score = obj["gad7"]
            if isinstance(score, bool) or not isinstance(score, int):
                raise MalformedLine(f"{path}:{lineno}: gad7 must be an integer")
            try:
                entry = ManifestEntry(
                    id=rec_id,
                    gad7=score,
                    audio_path=obj.get("audio_path"),
                    split=obj.get("split"),
                )
            except (ScoreOutOfRange, InvalidInput) as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc}") from None
            entries.append(entry)
    return entries


def write_manifest(path, entries: list[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            obj: dict = {"id": e.id, "gad7": e.gad7}
            if e.audio_path is not None:
                obj["audio_path"] = e.audio_path
            if e.split is not None:
                obj["split"] = e.split
            fh.write(json.dumps(obj) + "\n")


def stratified_split(
    entries: list[ManifestEntry],
    ratios: tuple[float, float, float] = DEFAULT_SPLIT_RATIOS,
    seed: int = 0,
) -> list[ManifestEntry]:
    """Assign train/valid/test tags, stratified on the binary label.

    Each class is shuffled with its own seeded draw and sliced by
    largest-remainder apportionment of ratios * class size, so per-class
    counts are within one of the exact proportion and the whole split is
    reproducible from the seed. Manifest order is preserved in the output.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise InvalidInput("ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise InvalidInput(f"ratios must sum to 1, got {sum(ratios)}")
    if not entries:
        raise EmptyClass("no entries to split")

    by_class: dict[int, list[int]] = {0: [], 1: []}
    for i, e in enumerate(entries):
        by_class[e.label].append(i)

    # A manifest with only one class still splits (stratification just
    # degenerates); learners guard against single-class training later.
    rng = np.random.default_rng(seed)
    assignment: dict[int, str] = {}
    for label in (0, 1):
        if not by_class[label]:
            continue
        idx = np.asarray(by_class[label])
        rng.shuffle(idx)
        counts = _largest_remainder(len(idx), ratios)
        offset = 0
        for split_name, count in zip(SPLIT_NAMES, counts):
            for j in idx[offset : offset + count]:
                assignment[int(j)] = split_name
            offset += count

    return [dataclasses.replace(e, split=assignment[i]) for i, e in enumerate(entries)]


def _largest_remainder(n: int, ratios) -> list[int]:
    """Apportion n items to the ratios; remainders break ties by list order."""
    exact = np.asarray(ratios, dtype=np.float64) * n
    base = np.floor(exact).astype(int)
    short = n - int(base.sum())
    order = np.argsort(-(exact - base), kind="stable")
    for k in order[:short]:
        base[k] += 1
    return base.tolist()


def split_subsets(entries: list[ManifestEntry]) -> dict[str, list[ManifestEntry]]:
    """Group tagged entries by split name; every entry must carry a tag."""
    out: dict[str, list[ManifestEntry]] = {name: [] for name in SPLIT_NAMES}
    for e in entries:
        if e.split is None:
            raise InvalidInput(f"entry {e.id!r} has no split tag")
        out[e.split].append(e)
    return out
