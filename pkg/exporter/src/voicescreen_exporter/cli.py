"""Command line front end: voicescreen-export --manifest M --kind K --out F."""

from __future__ import annotations

import argparse
import sys

from .errors import (
    AudioDecodeFailure,
    BackendContractViolation,
    DuplicateId,
    InvalidExportSpec,
    MalformedManifest,
    MissingField,
    ModelUnavailable,
)
from .export import export
from .spec import EXPORT_KINDS, ExportSpec

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_INPUT = 3
EXIT_MODEL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voicescreen-export",
        description="Run a pretrained embedding/annotation model over a manifest "
        "and write a JSONL interchange file.",
    )
    parser.add_argument("--manifest", required=True, help="recording manifest (JSONL)")
    parser.add_argument("--kind", required=True, choices=EXPORT_KINDS)
    parser.add_argument("--out", required=True, help="output JSONL path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = ExportSpec(manifest=args.manifest, kind=args.kind, output=args.out)
        out_path = export(spec)
    except InvalidExportSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (MalformedManifest, DuplicateId, MissingField, AudioDecodeFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelUnavailable, BackendContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    print(f"wrote {out_path}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
