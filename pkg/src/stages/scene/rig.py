"""Binocular pedestrian rig: a look-at head carrying two parallel eye cameras.

World frame: +x east, +y north, +z up (meters). Camera frame: x right, y up,
z forward. Pixel (i, j) has its center at (i + 0.5, j + 0.5), row 0 at the top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from ...core.errors import DegenerateLookError, TilingError

WORLD_UP = np.array([0.0, 0.0, 1.0])

EYE_HEIGHT = 1.75
INTERPUPILLARY_DISTANCE = 0.1103594
HFOV_DEG = 107.0
EYE_WIDTH = 6420
EYE_HEIGHT_PX = 8100
TILE_GRID = (5, 5)  # (rows, cols)

NEAR = 0.05
FAR = 5000.0


@dataclass(frozen=True)
class Orientation:
    forward: np.ndarray
    right: np.ndarray
    up: np.ndarray


def head_orientation(head: np.ndarray, target: np.ndarray) -> Orientation:
    """Full look-at from `head` toward `target` with a world-vertical up reference."""
    d = np.asarray(target, dtype=np.float64) - np.asarray(head, dtype=np.float64)
    n = float(np.linalg.norm(d))
    if n < 1e-12:
        raise DegenerateLookError("look-at target coincides with the head")
    forward = d / n
    right = np.cross(forward, WORLD_UP)
    rn = float(np.linalg.norm(right))
    if rn < 1e-9:
        raise DegenerateLookError("look-at target is straight above or below the head")
    right /= rn
    up = np.cross(right, forward)
    return Orientation(forward=forward, right=right, up=up)


@dataclass(frozen=True)
class Camera:
    center: np.ndarray
    orientation: Orientation
    focal: float          # pixels
    width: int
    height: int
    eye: str = "L"
    near: float = NEAR
    far: float = FAR

    @property
    def rotation(self) -> np.ndarray:
        """World->camera rotation, rows are the camera axes."""
        o = self.orientation
        return np.stack([o.right, o.up, o.forward])

    def to_camera(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) - self.center) @ self.rotation.T

    def project(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Pixel coordinates (..., 2) and forward depth (...) of world points."""
        pc = self.to_camera(points)
        z = pc[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            px = self.width * 0.5 + self.focal * pc[..., 0] / z
            py = self.height * 0.5 - self.focal * pc[..., 1] / z
        return np.stack([px, py], axis=-1), z

    @property
    def vfov_deg(self) -> float:
        return math.degrees(2.0 * math.atan(self.height * 0.5 / self.focal))


@dataclass(frozen=True)
class CameraRig:
    head: np.ndarray = field(default_factory=lambda: np.zeros(3))  # ground point under the head
    eye_height: float = EYE_HEIGHT
    ipd: float = INTERPUPILLARY_DISTANCE
    hfov_deg: float = HFOV_DEG
    width: int = EYE_WIDTH
    height: int = EYE_HEIGHT_PX
    tiles: Tuple[int, int] = TILE_GRID
    look_at_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        rows, cols = self.tiles
        if self.width % cols or self.height % rows:
            raise TilingError(f"{self.width}x{self.height} does not split into a {rows}x{cols} grid")

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.head, dtype=np.float64) + np.array([0.0, 0.0, self.eye_height])

    @property
    def focal(self) -> float:
        return self.width * 0.5 / math.tan(math.radians(self.hfov_deg) * 0.5)

    @property
    def tile_size(self) -> Tuple[int, int]:
        rows, cols = self.tiles
        return self.width // cols, self.height // rows

    def scaled(self, scale: int) -> "CameraRig":
        """Shrink each tile by `scale` (floored); FOV and tile grid are kept."""
        if scale == 1:
            return self
        rows, cols = self.tiles
        tw, th = self.tile_size
        tw, th = tw // scale, th // scale
        if tw < 1 or th < 1:
            raise TilingError(f"scale {scale} leaves an empty tile")
        return replace(self, width=tw * cols, height=th * rows)

    def describe(self) -> dict:
        return {
            "head": [float(v) for v in self.head],
            "eye_height": self.eye_height,
            "ipd": self.ipd,
            "hfov_deg": self.hfov_deg,
            "width": self.width,
            "height": self.height,
            "tiles": list(self.tiles),
            "focal_px": self.focal,
        }


def eye_cameras(rig: CameraRig, subject_position: np.ndarray) -> Tuple[Camera, Camera]:
    """Left and right eye cameras sharing the head's look-at orientation."""
    target = np.asarray(subject_position, dtype=np.float64) + np.asarray(rig.look_at_offset, dtype=np.float64)
    center = rig.center
    o = head_orientation(center, target)
    half = 0.5 * rig.ipd * o.right
    common = dict(orientation=o, focal=rig.focal, width=rig.width, height=rig.height)
    return Camera(center=center - half, eye="L", **common), Camera(center=center + half, eye="R", **common)
