"""Part Identification Texture: census, baking to an image, and the sidecar part table."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

import numpy as np

from ...core.errors import ConsistencyError, MeshFormatError
from ..palette import COLOR_COUNT, SIZE, pack_image, read_png, unpack_image, write_png
from .ownership import UNOWNED, PartIdentificationTexture
from .part_map import PartTable

log = logging.getLogger(__name__)

SIDECAR_VERSION = 1
PIDT_IMAGE = "pidt.png"
PIDT_SIDECAR = "parts.json"


@dataclass
class TexelCensus:
    counts: Dict[str, int]
    total: int

    def as_rows(self) -> List[tuple[str, int]]:
        """Part name -> owned texel count, in part-id order."""
        return list(self.counts.items())


def census(pidt: PartIdentificationTexture) -> TexelCensus:
    owned = pidt.part[pidt.part >= 0].astype(np.int64)
    per_part = np.bincount(owned, minlength=len(pidt.parts))
    counts = {name: int(per_part[i]) for i, name in enumerate(pidt.parts)}
    return TexelCensus(counts=counts, total=int(owned.size))


def bake_pidt_image(pidt: PartIdentificationTexture, table: PartTable) -> np.ndarray:
    """4096x4096x3 image: owned texels in their part color, the rest in the background color."""
    if list(table.names) != list(pidt.parts):
        raise ConsistencyError("part table does not list the PIdT parts in id order")
    lut = np.asarray(list(table.colors) + [table.background], dtype=np.uint32)
    idx = np.where(pidt.part >= 0, pidt.part.astype(np.int64), len(table.colors))
    return unpack_image(lut[idx])


def parse_pidt_image(rgb: np.ndarray, table: PartTable) -> PartIdentificationTexture:
    """Inverse of bake_pidt_image."""
    lookup = np.full(COLOR_COUNT, -2, dtype=np.int16)
    lookup[table.background] = UNOWNED
    for i, c in enumerate(table.colors):
        lookup[c] = i
    part = lookup[pack_image(rgb)]
    if np.any(part == -2):
        raise ConsistencyError("PIdT image holds colors that are not in its part table")
    return PartIdentificationTexture(part=part, parts=list(table.names))


def write_pidt(pidt: PartIdentificationTexture, table: PartTable, out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    write_png(bake_pidt_image(pidt, table), out_dir / PIDT_IMAGE)
    c = census(pidt)
    sidecar = {
        "format_version": SIDECAR_VERSION,
        "size": SIZE,
        "background": f"#{table.background:06X}",
        "total_texels": c.total,
        "parts": [
            {"id": i, "name": name, "color": f"#{table.colors[i]:06X}", "texels": c.counts[name]}
            for i, name in enumerate(table.names)
        ],
    }
    path = out_dir / PIDT_SIDECAR
    path.write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    log.info("wrote PIdT (%d parts, %d texels) to %s", len(table.names), c.total, out_dir)
    return path


def read_pidt(pidt_dir: Path) -> tuple[PartIdentificationTexture, PartTable, TexelCensus]:
    """Load pidt.png + parts.json and check the recorded census against the image."""
    pidt_dir = Path(pidt_dir)
    try:
        meta = json.loads((pidt_dir / PIDT_SIDECAR).read_text(encoding="utf-8"))
        rgb = read_png(pidt_dir / PIDT_IMAGE)
    except (OSError, json.JSONDecodeError) as e:
        raise MeshFormatError(f"cannot read PIdT from {pidt_dir}: {e}") from e
    rows = sorted(meta["parts"], key=lambda r: r["id"])
    table = PartTable(
        names=[r["name"] for r in rows],
        colors=[int(r["color"].lstrip("#"), 16) for r in rows],
        background=int(meta["background"].lstrip("#"), 16),
    )
    pidt = parse_pidt_image(rgb, table)
    recorded = TexelCensus(counts={r["name"]: int(r["texels"]) for r in rows}, total=int(meta["total_texels"]))
    return pidt, table, recorded
