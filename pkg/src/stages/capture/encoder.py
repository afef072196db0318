"""Lossless tile encoding with pinned settings, and the empty-tile size threshold."""

from __future__ import annotations

import functools
import io
import logging
import zlib
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import PIL
from PIL import Image

from ...core.errors import StorageError
from ..palette import pack_image, unpack_image

log = logging.getLogger(__name__)

# No pnginfo, dpi or icc_profile is ever passed, so no ancillary chunks are written.
PNG_SETTINGS = {"format": "PNG", "compress_level": 6, "optimize": False}
SAMPLE_COLORS = (0x000000, 0xFFFFFF, 0x123456)


def encoder_settings() -> dict:
    return {**PNG_SETTINGS, "pillow": PIL.__version__, "zlib": zlib.ZLIB_RUNTIME_VERSION}


def encode_tile(pixels: np.ndarray) -> bytes:
    """Packed (H, W) uint32 colors -> PNG bytes (8-bit RGB)."""
    buf = io.BytesIO()
    try:
        Image.fromarray(unpack_image(pixels)).save(buf, **PNG_SETTINGS)
    except OSError as e:
        raise StorageError(f"PNG encoding failed: {e}") from e
    return buf.getvalue()


def decode_tile(data: bytes, name: str = "tile") -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as im:
            return pack_image(np.asarray(im.convert("RGB")))
    except (OSError, ValueError, SyntaxError) as e:
        raise StorageError(f"cannot decode {name}: {e}") from e


@dataclass(frozen=True)
class TrimThreshold:
    length: int                  # bytes of a solid ignore-color tile
    width: int
    height: int
    ignore_color: int
    solid_lengths_uniform: bool = True


@functools.lru_cache(maxsize=None)
def compute_threshold(dims: Tuple[int, int], ignore: int) -> TrimThreshold:
    """Encode a solid ignore-color tile of `dims` = (width, height) and keep its length."""
    w, h = dims
    length = len(encode_tile(np.full((h, w), ignore, dtype=np.uint32)))
    sampled = {c: len(encode_tile(np.full((h, w), c, dtype=np.uint32))) for c in SAMPLE_COLORS}
    uniform = all(v == length for v in sampled.values())
    if not uniform:
        log.warning("solid %dx%d tiles encode to different lengths %s; threshold uses the ignore color (%d bytes)",
                    w, h, sorted(set(sampled.values()) | {length}), length)
    log.info("trim threshold for %dx%d tiles: %d bytes", w, h, length)
    return TrimThreshold(length=length, width=w, height=h, ignore_color=ignore, solid_lengths_uniform=uniform)
