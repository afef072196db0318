"""Counts -> plasma-gradient texture sharing the FCSP/PIdT UV layout."""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ...core.errors import EmptyDataError, PlasmaRangeError
from ..palette import SIZE, unpack_image, write_png
from .counting import ExposureCounts

DATA_DIR = Path(__file__).parent / "data"
PLASMA_LUT = DATA_DIR / "plasma_lut.json"
HEATMAP_NAME = "heatmap.png"


@functools.lru_cache(maxsize=1)
def load_lut(path: Path = PLASMA_LUT) -> np.ndarray:
    """(256, 3) float64 RGB entries."""
    with Path(path).open("r", encoding="utf-8") as f:
        entries = json.load(f)["entries"]
    lut = np.asarray(entries, dtype=np.float64)
    if lut.shape != (256, 3):
        raise ValueError(f"{path}: expected 256 RGB entries, got {lut.shape}")
    return lut


def plasma_colors(u: np.ndarray) -> np.ndarray:
    """Vectorised plasma: fractions in [0, 1] -> packed uint32 colors."""
    u = np.asarray(u, dtype=np.float64)
    if u.size and (np.any(~np.isfinite(u)) or u.min() < 0.0 or u.max() > 1.0):
        raise PlasmaRangeError("plasma input must lie in [0, 1]")
    lut = load_lut()
    pos = u * 255.0
    i = np.minimum(np.floor(pos).astype(np.int64), 254)
    f = (pos - i)[..., None]
    rgb = np.floor(lut[i] * (1.0 - f) + lut[i + 1] * f + 0.5).astype(np.uint32)
    return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]


def plasma(u: float) -> int:
    return int(plasma_colors(np.asarray([u]))[0])


@dataclass
class HeatmapTexture:
    image: np.ndarray   # (SIZE, SIZE, 3) uint8
    max_value: int

    def save(self, path: Path) -> Path:
        return write_png(self.image, path)


def emit_heatmap(counts: ExposureCounts) -> HeatmapTexture:
    """Every texel gets plasma(count / max); zero counts map to plasma(0)."""
    peak = counts.max
    if peak == 0:
        raise EmptyDataError("no color was observed; nothing to normalise the heatmap by")
    # one color per distinct count value
    table = plasma_colors(np.arange(peak + 1, dtype=np.float64) / peak)
    packed = table[counts.counts.reshape(SIZE, SIZE)]
    return HeatmapTexture(image=unpack_image(packed), max_value=peak)
