from __future__ import annotations

import colorsys
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError

from ...core.errors import ConsistencyError, MeshFormatError

OTHERS = "Others"
PIDT_BACKGROUND = 0x000000

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_PART_MAP = DATA_DIR / "vehicle_parts.yaml"


class _Rule(BaseModel):
    model_config = ConfigDict(extra="forbid")
    pattern: str
    part: str


class _PartMapFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    parts: List[str] = []
    colors: Dict[str, str] = {}
    rules: List[_Rule] = []


@dataclass
class PartMap:
    """Group/object name -> part name. First matching rule wins; no rules means identity."""
    rules: List[tuple[re.Pattern, str]] = field(default_factory=list)
    parts: List[str] = field(default_factory=list)
    colors: Dict[str, int] = field(default_factory=dict)

    def resolve(self, group: str) -> str:
        if not self.rules:
            return group
        for pattern, part in self.rules:
            if pattern.search(group):
                return part
        return OTHERS

    @classmethod
    def load(cls, path: Optional[Path]) -> "PartMap":
        if path is None:
            return cls()
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
            doc = _PartMapFile.model_validate(raw)
        except (OSError, yaml.YAMLError, ValidationError) as e:
            raise MeshFormatError(f"bad part map {path}: {e}") from e
        return cls(
            rules=[(re.compile(r.pattern, re.IGNORECASE), r.part) for r in doc.rules],
            parts=list(doc.parts),
            colors={name: int(hex_code.lstrip("#"), 16) for name, hex_code in doc.colors.items()},
        )


def _default_color(i: int) -> int:
    # golden-ratio hue walk gives well separated, deterministic colors
    h = (i * 0.6180339887498949) % 1.0
    s = 0.55 + 0.4 * ((i * 7) % 5) / 4
    v = 0.95 - 0.3 * ((i * 3) % 4) / 3
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return (round(r * 255) << 16) | (round(g * 255) << 8) | round(b * 255)


@dataclass
class PartTable:
    """Part name -> identification color, in part-id order."""
    names: List[str]
    colors: List[int]
    background: int = PIDT_BACKGROUND

    def __post_init__(self) -> None:
        if len(set(self.colors)) != len(self.colors):
            raise ConsistencyError("part identification colors are not pairwise distinct")
        if self.background in self.colors:
            raise ConsistencyError(f"a part uses the PIdT background color {self.background:#08x}")

    @classmethod
    def build(cls, names: List[str], explicit: Optional[Dict[str, int]] = None) -> "PartTable":
        explicit = explicit or {}
        taken = set(explicit.values()) | {PIDT_BACKGROUND}
        colors: List[int] = []
        i = 0
        for name in names:
            if name in explicit:
                colors.append(explicit[name])
                continue
            c = _default_color(i)
            while c in taken:
                i += 1
                c = _default_color(i)
            taken.add(c)
            colors.append(c)
            i += 1
        return cls(names=list(names), colors=colors)
