"""Full Color Space Palette: every 24-bit color at exactly one texel of a 4096x4096 texture.

Texel (x, y) with row 0 at the top has linear index y*4096 + x, and that index *is*
the packed color 0xRRGGBB.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np
from PIL import Image

from ...core.errors import NoIgnoreColorError, PaletteRangeError, StorageError

log = logging.getLogger(__name__)

SIZE = 4096
COLOR_COUNT = SIZE * SIZE  # == 256**3
DEFAULT_IGNORE_COLOR = 0x000FFF

ColorCode = int


class TexelIndex(NamedTuple):
    x: int
    y: int

    @property
    def linear(self) -> int:
        return self.y * SIZE + self.x


def pack_rgb(r: int, g: int, b: int) -> ColorCode:
    return (r << 16) | (g << 8) | b


def unpack_rgb(c: ColorCode) -> tuple[int, int, int]:
    return (c >> 16) & 0xFF, (c >> 8) & 0xFF, c & 0xFF


def pack_image(rgb: np.ndarray) -> np.ndarray:
    """HxWx3 uint8 -> HxW uint32 packed colors."""
    rgb = rgb.astype(np.uint32, copy=False)
    return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]


def unpack_image(packed: np.ndarray) -> np.ndarray:
    """HxW packed colors -> HxWx3 uint8."""
    packed = packed.astype(np.uint32, copy=False)
    out = np.empty(packed.shape + (3,), dtype=np.uint8)
    out[..., 0] = (packed >> 16) & 0xFF
    out[..., 1] = (packed >> 8) & 0xFF
    out[..., 2] = packed & 0xFF
    return out


def index_to_color(t: TexelIndex | tuple[int, int]) -> ColorCode:
    x, y = t
    if not (0 <= x < SIZE and 0 <= y < SIZE):
        raise PaletteRangeError(f"texel ({x}, {y}) outside {SIZE}x{SIZE}")
    return y * SIZE + x


def color_to_index(c: ColorCode) -> TexelIndex:
    if not 0 <= c < COLOR_COUNT:
        raise PaletteRangeError(f"color {c:#x} is not a 24-bit value")
    return TexelIndex(c % SIZE, c // SIZE)


def palette_codes() -> np.ndarray:
    """4096x4096 uint32 array of packed colors, the in-memory FCSP texture."""
    return np.arange(COLOR_COUNT, dtype=np.uint32).reshape(SIZE, SIZE)


def generate_fcsp() -> np.ndarray:
    """The FCSP as a 4096x4096x3 uint8 image."""
    return unpack_image(palette_codes())


def write_png(rgb: np.ndarray, path: Path) -> Path:
    """Write an 8-bit RGB PNG with no ancillary chunks."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8)).save(path, format="PNG", compress_level=6)
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e
    return path


def read_png(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def save_fcsp(path: Path) -> Path:
    log.info("writing FCSP to %s", path)
    return write_png(generate_fcsp(), path)


def color_census(rgb: np.ndarray) -> int:
    """Number of distinct colors in an image, via a 2^24-entry occupancy set."""
    seen = np.zeros(COLOR_COUNT, dtype=bool)
    seen[pack_image(rgb).ravel()] = True
    return int(np.count_nonzero(seen))


def select_ignore_color(covered: Iterable[ColorCode] | np.ndarray) -> ColorCode:
    """Pick the color assigned to background and occluders.

    0x000FFF when no mesh texel owns it, otherwise the smallest unowned color.
    `covered` may be an iterable of colors or a boolean mask over the color space.
    """
    covered_arr = np.asarray(covered if isinstance(covered, np.ndarray) else list(covered))
    if covered_arr.dtype == bool and covered_arr.size == COLOR_COUNT:
        occupied = covered_arr
    else:
        occupied = np.zeros(COLOR_COUNT, dtype=bool)
        if covered_arr.size:
            occupied[covered_arr.astype(np.int64)] = True

    if not occupied[DEFAULT_IGNORE_COLOR]:
        return DEFAULT_IGNORE_COLOR
    free = np.flatnonzero(~occupied)
    if free.size == 0:
        raise NoIgnoreColorError("every color of the palette is owned by a mesh texel")
    return int(free[0])
