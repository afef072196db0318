"""Unlit, single-sample rendering of a scenario through one eye."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ...core.errors import GeometryError
from ..meshkit import texel_ownership
from ..palette import DEFAULT_IGNORE_COLOR, palette_codes
from ..scene import Camera, Scenario
from .frame import Frame
from .kernels import cull_and_clip, rasterize

log = logging.getLogger(__name__)


def backface_and_clip(triangle: np.ndarray, camera: Camera, uv: Optional[np.ndarray] = None):
    """Cull a world-space triangle if it faces away, else clip it to the near plane.

    Returns (camera-space triangles (k, 3, 3), uvs (k, 3, 2)) with k in {1, 2},
    or None when nothing survives. Winding is preserved.
    """
    cam = camera.to_camera(np.asarray(triangle, dtype=np.float64).reshape(1, 3, 3))
    uvs = np.zeros((1, 3, 2)) if uv is None else np.asarray(uv, dtype=np.float64).reshape(1, 3, 2)
    out_t = np.empty((2, 3, 3))
    out_uv = np.empty((2, 3, 2))
    out_id = np.empty(2, dtype=np.int32)
    m = cull_and_clip(cam, uvs, np.zeros(1, dtype=np.int32), camera.near, out_t, out_uv, out_id)
    if m == 0:
        return None
    return out_t[:m], out_uv[:m]


class Renderer:
    """Holds the per-run surface state (texture, owner map, ignore color) for a scenario."""

    def __init__(
        self,
        scenario: Scenario,
        ignore_color: int = DEFAULT_IGNORE_COLOR,
        texture: Optional[np.ndarray] = None,
        owner: Optional[np.ndarray] = None,
    ):
        self.scenario = scenario
        self.ignore_color = int(ignore_color)
        self.texture = palette_codes() if texture is None else np.ascontiguousarray(texture, dtype=np.uint32)
        mesh = scenario.subject
        if owner is None and mesh is not None and mesh.triangle_count:
            owner = texel_ownership(mesh).owner
        self.owner = owner if owner is not None else np.full((1, 1), -1, dtype=np.int32)
        self.use_owner = owner is not None
        self._occluders = scenario.occluder_triangles()
        if mesh is not None and mesh.triangle_count:
            self._subject_uvs = np.ascontiguousarray(mesh.uvs, dtype=np.float64)
            self._subject_ids = np.arange(mesh.triangle_count, dtype=np.int32)
        else:
            self._subject_uvs = np.zeros((0, 3, 2))
            self._subject_ids = np.zeros(0, dtype=np.int32)

    def render(self, t: float, eye: str, frame_index: int = 0) -> Frame:
        sc = self.scenario
        left, right = sc.cameras(t)
        camera = left if eye == "L" else right
        world = np.concatenate([sc.subject_triangles(t), self._occluders])
        uvs = np.concatenate([self._subject_uvs, np.zeros((len(self._occluders), 3, 2))])
        ids = np.concatenate([self._subject_ids, np.full(len(self._occluders), -1, dtype=np.int32)])

        cam = camera.to_camera(world.reshape(-1, 3)).reshape(-1, 3, 3) if len(world) else np.zeros((0, 3, 3))
        if not np.all(np.isfinite(cam)):
            raise GeometryError(f"non-finite vertex at t={t:.4f} eye={eye}")

        n = len(cam)
        out_t = np.empty((2 * n, 3, 3))
        out_uv = np.empty((2 * n, 3, 2))
        out_id = np.empty(2 * n, dtype=np.int32)
        m = cull_and_clip(np.ascontiguousarray(cam), uvs, ids, camera.near, out_t, out_uv, out_id)

        color = np.full((camera.height, camera.width), self.ignore_color, dtype=np.uint32)
        depth = np.full((camera.height, camera.width), np.inf, dtype=np.float32)
        rasterize(out_t, out_uv, out_id, m, camera.focal, camera.near, camera.far,
                  self.texture, self.owner, self.use_owner, self.ignore_color, color, depth)
        return Frame(pixels=color, depth=depth, scenario_id=sc.id, frame_index=frame_index, eye=eye, time=t)


def render_frame(scenario: Scenario, t: float, eye: str, ignore_color: int = DEFAULT_IGNORE_COLOR,
                 frame_index: int = 0) -> Frame:
    """One-shot render; use Renderer directly to reuse ownership across frames."""
    return Renderer(scenario, ignore_color=ignore_color).render(t, eye, frame_index)
