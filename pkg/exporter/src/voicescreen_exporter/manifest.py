"""Minimal manifest reader.

The exporter deliberately does not import the main package; it speaks the
same JSONL manifest format through its own small parser. Only the fields the
exporter needs are read: "id" (required), "audio_path" and "text" (optional,
whichever the export kind consumes). Unknown fields are ignored so manifests
written for the screening pipelines load unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateId, MalformedManifest


@dataclass(frozen=True)
class ManifestRow:
    id: str
    audio_path: str | None
    text: str | None


def read_manifest(path: str | Path) -> list[ManifestRow]:
    """Parse JSONL rows in file order; '#' comment lines and blanks skipped."""
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise MalformedManifest(f"{path}:{lineno}: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise MalformedManifest(f"{path}:{lineno}: expected a JSON object")
            rec_id = obj.get("id")
            if not isinstance(rec_id, str) or not rec_id:
                raise MalformedManifest(f"{path}:{lineno}: missing or empty id")
            if rec_id in seen:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            audio_path = obj.get("audio_path")
            if audio_path is not None and not isinstance(audio_path, str):
                raise MalformedManifest(f"{path}:{lineno}: audio_path must be a string")
            text = obj.get("text")
            if text is not None and not isinstance(text, str):
                raise MalformedManifest(f"{path}:{lineno}: text must be a string")
            rows.append(ManifestRow(id=rec_id, audio_path=audio_path, text=text))
    if not rows:
        raise MalformedManifest(f"{path}: manifest has no rows")
    return rows
