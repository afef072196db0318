from __future__ import annotations

import math
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ...core.errors import MeshFormatError
from ..meshkit import resolve_index
from .trajectory import rotation_z

# (outward normal, a, b) with a x b == normal
_BOX_FACES = (
    (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0])),
    (np.array([-1.0, 0, 0]), np.array([0, 0, 1.0]), np.array([0, 1.0, 0])),
    (np.array([0, 1.0, 0]), np.array([0, 0, 1.0]), np.array([1.0, 0, 0])),
    (np.array([0, -1.0, 0]), np.array([1.0, 0, 0]), np.array([0, 0, 1.0])),
    (np.array([0, 0, 1.0]), np.array([1.0, 0, 0]), np.array([0, 1.0, 0])),
    (np.array([0, 0, -1.0]), np.array([0, 1.0, 0]), np.array([1.0, 0, 0])),
)


def box_triangles(center: Sequence[float], size: Sequence[float], yaw_deg: float = 0.0) -> np.ndarray:
    """(12, 3, 3) counter-clockwise (outward-facing) triangles of an axis box rotated about +z."""
    half = 0.5 * np.asarray(size, dtype=np.float64)
    tris: List[np.ndarray] = []
    for n, a, b in _BOX_FACES:
        c = n * half
        ha, hb = a * half, b * half
        quad = [c - ha - hb, c + ha - hb, c + ha + hb, c - ha + hb]
        tris.append(np.stack([quad[0], quad[1], quad[2]]))
        tris.append(np.stack([quad[0], quad[2], quad[3]]))
    out = np.stack(tris) @ rotation_z(math.radians(yaw_deg)).T
    return out + np.asarray(center, dtype=np.float64)


def load_triangles(path: Path) -> np.ndarray:
    """Geometry-only OBJ read (positions and faces), fan-triangulated, (N, 3, 3)."""
    path = Path(path)
    positions: List[List[float]] = []
    tris: List[List[int]] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise MeshFormatError(f"cannot read occluder mesh {path}: {e}") from e
    for line_no, line in enumerate(lines, start=1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if toks[0] == "v":
            if len(toks) < 4:
                raise MeshFormatError(f"{path.name} line {line_no}: vertex needs 3 coordinates")
            try:
                positions.append([float(v) for v in toks[1:4]])
            except ValueError as e:
                raise MeshFormatError(f"{path.name} line {line_no}: {e}") from e
        elif toks[0] == "f":
            if len(toks) < 4:
                raise MeshFormatError(f"{path.name} line {line_no}: face needs at least 3 corners")
            ids = [resolve_index(v.split("/")[0], len(positions), "vertex", line_no) for v in toks[1:]]
            for i in range(2, len(ids)):
                tris.append([ids[0], ids[i - 1], ids[i]])
    if not tris:
        return np.zeros((0, 3, 3))
    return np.asarray(positions, dtype=np.float64)[np.asarray(tris)]
