from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Iterable

import blake3

STAMP_NAME = ".stage.json"
FORMAT_VERSION = 1


def content_hash(inputs: Iterable[Any]) -> str:
    """BLAKE3 over stage inputs: files hash by content, everything else by its JSON form."""
    h = blake3.blake3()
    h.update(f"v{FORMAT_VERSION}".encode())
    for item in inputs:
        if isinstance(item, Path):
            h.update(b"file:")
            h.update(item.read_bytes() if item.is_file() else str(item).encode())
        else:
            h.update(b"value:")
            h.update(json.dumps(item, sort_keys=True, default=str).encode())
    return h.hexdigest()


def is_fresh(stage_dir: Path, digest: str, outputs: Iterable[Path]) -> bool:
    stamp = stage_dir / STAMP_NAME
    if not stamp.exists():
        return False
    try:
        recorded = json.loads(stamp.read_text(encoding="utf-8")).get("hash")
    except json.JSONDecodeError:
        return False
    return recorded == digest and all(p.exists() for p in outputs)


def write_stamp(stage_dir: Path, digest: str, metrics: Dict[str, Any] | None = None) -> None:
    stamp = {"hash": digest, "metrics": metrics or {}}
    (stage_dir / STAMP_NAME).write_text(json.dumps(stamp, indent=2, default=str), encoding="utf-8")


def read_metrics(stage_dir: Path) -> Dict[str, Any]:
    """Metrics recorded by the run that produced the cached outputs."""
    try:
        return json.loads((stage_dir / STAMP_NAME).read_text(encoding="utf-8")).get("metrics", {})
    except (OSError, json.JSONDecodeError):
        return {}
