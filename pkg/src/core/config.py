from __future__ import annotations

from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

# Full-resolution tile (1/5 of 6420x8100); the scale divisor shrinks the tile, not the frame.
BASE_TILE_WIDTH = 1284
BASE_TILE_HEIGHT = 1620


class RunConfig(BaseModel):
    """Every knob of a pipeline run. Nothing is read from the environment."""
    model_config = ConfigDict(extra="forbid")

    scenario: Optional[Path] = None
    mesh: Optional[Path] = None
    parts: Optional[Path] = None
    out: Path = Path("out")

    scale: int = Field(default=1, ge=1)
    no_trim: bool = False
    strict_colors: bool = False
    dump_frames: bool = False
    workers: int = Field(default=1, ge=1)
    force: bool = False

    @field_validator("scale")
    @classmethod
    def _scale_fits_tile_grid(cls, v: int) -> int:
        if BASE_TILE_WIDTH // v < 1 or BASE_TILE_HEIGHT // v < 1:
            raise ValueError(f"scale {v} leaves an empty tile (max {BASE_TILE_WIDTH})")
        return v

    def tile_size(self) -> tuple[int, int]:
        """(width, height) of one tile after applying the scale divisor."""
        return BASE_TILE_WIDTH // self.scale, BASE_TILE_HEIGHT // self.scale
