"""Wavefront OBJ loading into part-labeled triangle meshes."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ...core.errors import MeshFormatError, UnwrapError
from .part_map import OTHERS, PartMap

log = logging.getLogger(__name__)


@dataclass
class LabeledMesh:
    vertices: np.ndarray      # (V, 3) float64, meters, model space (+x forward, +z up)
    faces: np.ndarray         # (T, 3) int32 vertex indices
    uvs: np.ndarray           # (T, 3, 2) float64 per-corner UVs in [0, 1]^2
    part_ids: np.ndarray      # (T,) int32 index into `parts`
    source_face: np.ndarray   # (T,) int32 polygon the triangle came from
    parts: List[str]
    name: str = "mesh"

    @property
    def triangle_count(self) -> int:
        return int(self.faces.shape[0])

    def corners(self) -> np.ndarray:
        """(T, 3, 3) triangle corner positions in model space."""
        return self.vertices[self.faces]

    @classmethod
    def empty(cls, name: str = "empty") -> "LabeledMesh":
        return cls(
            vertices=np.zeros((0, 3)),
            faces=np.zeros((0, 3), dtype=np.int32),
            uvs=np.zeros((0, 3, 2)),
            part_ids=np.zeros(0, dtype=np.int32),
            source_face=np.zeros(0, dtype=np.int32),
            parts=[],
            name=name,
        )


def resolve_index(idx: str, count: int, what: str, line_no: int) -> int:
    """OBJ index token -> 0-based index; MeshFormatError when malformed or out of range."""
    try:
        i = int(idx)
    except ValueError:
        raise MeshFormatError(f"line {line_no}: bad {what} index {idx!r}") from None
    i = i - 1 if i > 0 else count + i  # OBJ is 1-based; negatives are relative
    if not 0 <= i < count:
        raise MeshFormatError(f"line {line_no}: {what} index {idx} out of range")
    return i


def load_mesh(path: Path, part_map: Optional[PartMap] = None) -> LabeledMesh:
    """Read an OBJ with per-corner UVs; `g`/`o` names become parts through `part_map`.

    Polygons are triangulated as fans. A face corner without a texture coordinate
    raises UnwrapError, since the mesh must arrive already unwrapped.
    """
    path = Path(path)
    part_map = part_map or PartMap()
    try:
        text = path.read_text(encoding="utf-8", errors="strict")
    except (OSError, UnicodeDecodeError) as e:
        raise MeshFormatError(f"cannot read mesh {path}: {e}") from e

    positions: List[List[float]] = []
    texcoords: List[List[float]] = []
    faces: List[List[int]] = []
    face_uvs: List[List[List[float]]] = []
    face_part: List[int] = []
    face_src: List[int] = []

    part_index: Dict[str, int] = {name: i for i, name in enumerate(part_map.parts)}
    parts: List[str] = list(part_map.parts)
    current_group = "default"
    polygon = 0

    def part_for(group: str) -> int:
        name = part_map.resolve(group)
        if name not in part_index:
            part_index[name] = len(parts)
            parts.append(name)
        return part_index[name]

    for line_no, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        try:
            if toks[0] == "v":
                positions.append([float(v) for v in toks[1:4]])
            elif toks[0] == "vt":
                texcoords.append([float(v) for v in toks[1:3]])
            elif toks[0] in ("g", "o"):
                current_group = " ".join(toks[1:]) or "default"
            elif toks[0] == "f":
                if len(toks) < 4:
                    raise MeshFormatError(f"line {line_no}: face needs at least 3 corners")
                corners = []
                for vstr in toks[1:]:
                    vals = vstr.split("/")
                    if len(vals) < 2 or not vals[1]:
                        raise UnwrapError(f"{path.name} line {line_no}: face corner without texture coordinate")
                    vid = resolve_index(vals[0], len(positions), "vertex", line_no)
                    tid = resolve_index(vals[1], len(texcoords), "texcoord", line_no)
                    corners.append((vid, tid))
                current_part = part_for(current_group)
                for i in range(2, len(corners)):
                    tri = (corners[0], corners[i - 1], corners[i])
                    faces.append([c[0] for c in tri])
                    face_uvs.append([texcoords[c[1]] for c in tri])
                    face_part.append(current_part)
                    face_src.append(polygon)
                polygon += 1
        except ValueError as e:
            raise MeshFormatError(f"{path.name} line {line_no}: {e}") from e

    if not faces:
        raise MeshFormatError(f"{path.name}: no faces")

    uvs = np.asarray(face_uvs, dtype=np.float64)
    if np.any(uvs < 0.0) or np.any(uvs > 1.0):
        raise UnwrapError(f"{path.name}: texture coordinates outside the unit square")

    if OTHERS in part_index and OTHERS not in part_map.parts:
        log.info("%s: groups without a matching rule were assigned to %s", path.name, OTHERS)

    mesh = LabeledMesh(
        vertices=np.asarray(positions, dtype=np.float64).reshape(-1, 3),
        faces=np.asarray(faces, dtype=np.int32),
        uvs=uvs,
        part_ids=np.asarray(face_part, dtype=np.int32),
        source_face=np.asarray(face_src, dtype=np.int32),
        parts=parts,
        name=path.stem,
    )
    log.info("loaded %s: %d triangles, %d parts", path.name, mesh.triangle_count, len(parts))
    return mesh
