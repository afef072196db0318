from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List

from ...core.errors import ManifestError
from .encoder import TrimThreshold

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


def tile_name(scenario_id: str, frame: int, eye: str, row: int, col: int) -> str:
    return f"S{scenario_id}_f{frame:04d}_{eye}_r{row}c{col}.png"


@dataclass(frozen=True)
class CaptureRecord:
    path: str           # relative to the capture directory
    scenario: str
    frame: int
    eye: str
    row: int
    col: int
    bytes: int
    keep: bool = False  # never trim: holds data although it encodes at or below the threshold


@dataclass
class Manifest:
    scenario: str
    threshold: TrimThreshold
    ignore_color: int
    encoder: Dict[str, Any]
    rig: Dict[str, Any]
    schedule: Dict[str, Any]
    records: List[CaptureRecord] = field(default_factory=list)
    root: Path = Path(".")

    def to_json(self) -> Dict[str, Any]:
        return {
            "format_version": MANIFEST_VERSION,
            "scenario": self.scenario,
            "ignore_color": f"#{self.ignore_color:06X}",
            "threshold": asdict(self.threshold),
            "encoder": self.encoder,
            "rig": self.rig,
            "schedule": self.schedule,
            "records": [asdict(r) for r in sorted(self.records, key=lambda r: r.path)],
        }

    def write(self, directory: Path) -> Path:
        path = Path(directory) / MANIFEST_NAME
        path.write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")
        return path

    @classmethod
    def read(cls, directory: Path) -> "Manifest":
        directory = Path(directory)
        path = directory / MANIFEST_NAME
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ManifestError(f"cannot read {path}: {e}") from e
        if raw.get("format_version") != MANIFEST_VERSION:
            raise ManifestError(f"{path}: unsupported manifest version {raw.get('format_version')}")
        return cls(
            scenario=raw["scenario"],
            threshold=TrimThreshold(**raw["threshold"]),
            ignore_color=int(raw["ignore_color"].lstrip("#"), 16),
            encoder=raw["encoder"],
            rig=raw["rig"],
            schedule=raw["schedule"],
            records=[CaptureRecord(**r) for r in raw["records"]],
            root=directory,
        )


def is_empty(record: CaptureRecord, thr: TrimThreshold) -> bool:
    """True when the tile encodes at or below the solid ignore-color length."""
    if record.keep:
        return False
    if record.bytes < thr.length:
        log.warning("%s is shorter than a solid tile (%d < %d bytes); skipped", record.path, record.bytes, thr.length)
    return record.bytes <= thr.length
