from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ...core.errors import TilingError


@dataclass
class Frame:
    pixels: np.ndarray      # (H, W) uint32 packed colors
    depth: np.ndarray       # (H, W) float32, 0 near .. 1 far, inf where nothing was drawn
    scenario_id: str
    frame_index: int
    eye: str
    time: float

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


@dataclass
class Tile:
    pixels: np.ndarray      # (tile_h, tile_w) uint32
    row: int
    col: int
    scenario_id: str
    frame_index: int
    eye: str


def split_tiles(frame: Frame, grid: Tuple[int, int] = (5, 5)) -> List[Tile]:
    """Row-major tiles that partition the frame exactly."""
    rows, cols = grid
    if frame.height % rows or frame.width % cols:
        raise TilingError(f"{frame.width}x{frame.height} frame does not split into {rows}x{cols} tiles")
    th, tw = frame.height // rows, frame.width // cols
    return [
        Tile(
            pixels=frame.pixels[r * th:(r + 1) * th, c * tw:(c + 1) * tw].copy(),
            row=r, col=c, scenario_id=frame.scenario_id, frame_index=frame.frame_index, eye=frame.eye,
        )
        for r in range(rows)
        for c in range(cols)
    ]


def join_tiles(tiles: List[Tile], grid: Tuple[int, int] = (5, 5)) -> np.ndarray:
    rows, cols = grid
    if len(tiles) != rows * cols:
        raise TilingError(f"expected {rows * cols} tiles, got {len(tiles)}")
    ordered = sorted(tiles, key=lambda t: (t.row, t.col))
    return np.vstack([np.hstack([t.pixels for t in ordered[r * cols:(r + 1) * cols]]) for r in range(rows)])
