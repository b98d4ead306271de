"""Versioned JSON artifact IO.

Every pipeline artifact is a single JSON document with "format" and
"version" keys. Serialization is byte-deterministic: sorted keys, fixed
separators, floats via repr (shortest round-trip).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any


class ArtifactError(ValueError):
    """Raised when an artifact file is missing, malformed, or mismatched."""


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) + "\n"


def write_artifact(path: str | Path, fmt: str, version: int,
                   payload: dict[str, Any]) -> None:
    doc = {"format": fmt, "version": version, **payload}
    data = dumps_canonical(doc)
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_artifact(path: str | Path, fmt: str, version: int) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"artifact not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"artifact {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != fmt:
        raise ArtifactError(
            f"artifact {path} has format {doc.get('format')!r}, expected {fmt!r}")
    if doc.get("version") != version:
        raise ArtifactError(
            f"artifact {path} has version {doc.get('version')!r}, expected {version}")
    return doc
