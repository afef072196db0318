"""Fixture builders: UV-islanded OBJ writers, scenario files, small run configs."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pytest
import yaml

from src.stages.meshkit import LabeledMesh
from src.stages.palette import SIZE

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = REPO_ROOT / "scenarios"

Vec3 = Tuple[float, float, float]
# (group, origin, edge a, edge b, (x0, y0, w, h) island in texels, y down)
Face = Tuple[str, Vec3, Vec3, Vec3, Tuple[int, int, int, int]]


def island_uvs(x0: int, y0: int, w: int, h: int) -> List[Tuple[float, float]]:
    """UVs of an island's bottom-left, bottom-right, top-right and top-left corners."""
    return [
        (x0 / SIZE, 1.0 - (y0 + h) / SIZE),
        ((x0 + w) / SIZE, 1.0 - (y0 + h) / SIZE),
        ((x0 + w) / SIZE, 1.0 - y0 / SIZE),
        (x0 / SIZE, 1.0 - y0 / SIZE),
    ]


def write_obj(path: Path, faces: Sequence[Face]) -> Path:
    """One quad per face; o, o+a, o+a+b, o+b with a x b pointing outward."""
    v_lines, vt_lines, f_lines = [], [], []
    for i, (group, o, a, b, rect) in enumerate(faces):
        o, a, b = np.asarray(o, float), np.asarray(a, float), np.asarray(b, float)
        for p in (o, o + a, o + a + b, o + b):
            v_lines.append("v " + " ".join(repr(float(c)) for c in p))
        for u, v in island_uvs(*rect):
            vt_lines.append(f"vt {u!r} {v!r}")
        k = 4 * i
        f_lines.append(f"g {group}")
        f_lines.append("f " + " ".join(f"{k + j}/{k + j}" for j in range(1, 5)))
    path = Path(path)
    path.write_text("\n".join(v_lines + vt_lines + f_lines) + "\n", encoding="utf-8")
    return path


def facing_quad(group: str = "Windshield", half: float = 0.5, height: float = 1.75,
                rect: Tuple[int, int, int, int] = (64, 64, 16, 16)) -> Face:
    """Vertical square in the plane x = 0 whose front faces -x."""
    return (group, (0.0, half, height - half), (0.0, -2 * half, 0.0), (0.0, 0.0, 2 * half), rect)


def box_faces(center: Vec3, size: Vec3, origin: Tuple[int, int] = (64, 64), texels: int = 16,
              gap: int = 8, prefix: str = "face") -> List[Face]:
    """Six outward quads of an axis-aligned box, each its own square UV island in one texture row."""
    (cx, cy, cz), (sx, sy, sz) = center, size
    x0, x1 = cx - sx / 2, cx + sx / 2
    y0, y1 = cy - sy / 2, cy + sy / 2
    z0, z1 = cz - sz / 2, cz + sz / 2
    sides = [
        ("px", (x1, y0, z0), (0, sy, 0), (0, 0, sz)),
        ("nx", (x0, y1, z0), (0, -sy, 0), (0, 0, sz)),
        ("py", (x1, y1, z0), (-sx, 0, 0), (0, 0, sz)),
        ("ny", (x0, y0, z0), (sx, 0, 0), (0, 0, sz)),
        ("pz", (x0, y0, z1), (sx, 0, 0), (0, sy, 0)),
        ("nz", (x0, y1, z0), (sx, 0, 0), (0, -sy, 0)),
    ]
    ox, oy = origin
    return [
        (f"{prefix}_{name}", o, a, b, (ox + i * (texels + gap), oy, texels, texels))
        for i, (name, o, a, b) in enumerate(sides)
    ]


def uv_mesh(triangles: Iterable[Sequence[Tuple[float, float]]], parts: Optional[Sequence[int]] = None,
            names: Optional[Sequence[str]] = None) -> LabeledMesh:
    """Geometry-free mesh from triangles given in texel raster coordinates (x right, y down)."""
    tris = np.asarray(list(triangles), dtype=np.float64)
    n = len(tris)
    uvs = np.empty((n, 3, 2))
    uvs[..., 0] = tris[..., 0] / SIZE
    uvs[..., 1] = 1.0 - tris[..., 1] / SIZE
    part_ids = np.asarray(parts if parts is not None else np.zeros(n), dtype=np.int32)
    vertices = np.zeros((3 * n, 3))
    vertices[:, :2] = uvs.reshape(-1, 2)
    return LabeledMesh(
        vertices=vertices,
        faces=np.arange(3 * n, dtype=np.int32).reshape(n, 3),
        uvs=uvs,
        part_ids=part_ids,
        source_face=np.arange(n, dtype=np.int32),
        parts=list(names) if names is not None else [f"part{i}" for i in range(int(part_ids.max()) + 1)],
        name="uv-fixture",
    )


def box_occluder(name: str, center: Vec3, size: Vec3) -> dict:
    return {"name": name, "box": {"center": list(center), "size": list(size)}}


def back_wall_occluder(path: Path, x: float = 1.5) -> dict:
    """Single-sided 6 m x 4 m plane at `x` whose front faces +x, away from a rig at the origin."""
    write_obj(path, [("wall", (x, -3.0, -0.25), (0.0, 6.0, 0.0), (0.0, 0.0, 4.0), (0, 0, 8, 8))])
    return {"name": "back-wall", "mesh": str(path)}


def write_scenario(
    path: Path,
    mesh: Path,
    position: Vec3 = (3.0, 0.0, 0.0),
    occluders: Sequence[dict] = (),
    rate: float = 10.0,
    duration: float = 1.0,
    scenario_id: str = "T",
    look_at_offset: Vec3 = (0.0, 0.0, 1.75),
    parts: Optional[Path] = None,
    keyframes: Optional[List[dict]] = None,
) -> Path:
    """Scenario YAML with a static subject unless `keyframes` is given."""
    keyframes = keyframes or [
        {"t": 0.0, "position": list(position), "yaw_deg": 0.0, "phase": "cruise"},
        {"t": duration, "position": list(position), "yaw_deg": 0.0},
    ]
    subject = {"mesh": str(mesh), "look_at_offset": list(look_at_offset), "trajectory": {"keyframes": keyframes}}
    if parts is not None:
        subject["parts"] = str(parts)
    doc = {
        "id": scenario_id,
        "subject": subject,
        "occluders": list(occluders),
        "capture": {"rate": rate, "duration": duration},
    }
    path = Path(path)
    path.write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")
    return path


@pytest.fixture
def quad_obj(tmp_path: Path) -> Path:
    return write_obj(tmp_path / "quad.obj", [facing_quad()])


@pytest.fixture
def quad_scenario(tmp_path: Path, quad_obj: Path) -> Path:
    """Face-on 1 m quad, 3 m ahead of the rig, 11 frames."""
    return write_scenario(tmp_path / "quad.yaml", quad_obj)


@pytest.fixture
def walled_scenario(tmp_path: Path, quad_obj: Path) -> Path:
    wall = box_occluder("wall", (1.5, 0.0, 1.75), (0.2, 6.0, 6.0))
    return write_scenario(tmp_path / "walled.yaml", quad_obj, occluders=[wall], scenario_id="W")

