"""Per-texel visibility verdicts by brute-force ray casting.

Segments run from the eye to the surface point and are tested against every
scene triangle with a watertight intersection, skipping the point's own
triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np
from numba import njit

from ..palette import TexelIndex
from ..scene import Camera, Scenario
from .surface import TexelSurfacePoint, triangle_normals

SELF_HIT_EPSILON = 1e-4  # times the scene scale


class Verdict(IntEnum):
    VISIBLE = 0
    OCCLUDED = 1
    OUT_OF_FRUSTUM = 2
    BACK_FACING = 3


@dataclass(frozen=True)
class VisibilityVerdict:
    texel: TexelIndex
    left: Verdict
    right: Verdict


@njit(cache=True)
def _segment_hit(o, d, a, b, c):
    """Watertight ray/triangle test; ray parameter of the hit (units of d) or -1."""
    ax_ = abs(d[0])
    ay_ = abs(d[1])
    az_ = abs(d[2])
    if ax_ >= ay_ and ax_ >= az_:
        kz = 0
    elif ay_ >= az_:
        kz = 1
    else:
        kz = 2
    kx = (kz + 1) % 3
    ky = (kx + 1) % 3
    if d[kz] < 0.0:
        kx, ky = ky, kx
    sx = d[kx] / d[kz]
    sy = d[ky] / d[kz]
    sz = 1.0 / d[kz]

    a_x = (a[kx] - o[kx]) - sx * (a[kz] - o[kz])
    a_y = (a[ky] - o[ky]) - sy * (a[kz] - o[kz])
    b_x = (b[kx] - o[kx]) - sx * (b[kz] - o[kz])
    b_y = (b[ky] - o[ky]) - sy * (b[kz] - o[kz])
    c_x = (c[kx] - o[kx]) - sx * (c[kz] - o[kz])
    c_y = (c[ky] - o[ky]) - sy * (c[kz] - o[kz])

    u = c_x * b_y - c_y * b_x
    v = a_x * c_y - a_y * c_x
    w = b_x * a_y - b_y * a_x
    if (u < 0.0 or v < 0.0 or w < 0.0) and (u > 0.0 or v > 0.0 or w > 0.0):
        return -1.0
    det = u + v + w
    if det == 0.0:
        return -1.0
    t = (u * sz * (a[kz] - o[kz]) + v * sz * (b[kz] - o[kz]) + w * sz * (c[kz] - o[kz])) / det
    return t


@njit(cache=True)
def verdict_kernel(points, normals, skip, center, rot, focal, width, height, near, far, tris, eps, codes, px, py):
    """Fill `codes` with Verdict values and (px, py) with projected pixel coordinates."""
    d = np.empty(3)
    for i in range(points.shape[0]):
        p = points[i]
        for j in range(3):
            d[j] = p[j] - center[j]
        cx = rot[0, 0] * d[0] + rot[0, 1] * d[1] + rot[0, 2] * d[2]
        cy = rot[1, 0] * d[0] + rot[1, 1] * d[1] + rot[1, 2] * d[2]
        cz = rot[2, 0] * d[0] + rot[2, 1] * d[1] + rot[2, 2] * d[2]
        if cz < near or cz > far:
            codes[i] = 2
            continue
        x = width * 0.5 + focal * cx / cz
        y = height * 0.5 - focal * cy / cz
        px[i] = x
        py[i] = y
        if not (0.0 <= x < width and 0.0 <= y < height):
            codes[i] = 2
            continue
        n = normals[i]
        if n[0] * d[0] + n[1] * d[1] + n[2] * d[2] >= 0.0:
            codes[i] = 3
            continue
        t_max = 1.0 - eps / math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
        codes[i] = 0
        for k in range(tris.shape[0]):
            if k == skip[i]:
                continue
            t = _segment_hit(center, d, tris[k, 0], tris[k, 1], tris[k, 2])
            if 0.0 < t < t_max:
                codes[i] = 1
                break


def scene_scale(scenario: Scenario) -> float:
    """Diagonal of the box around the rig, the occluders and the subject's path."""
    pts = [scenario.rig.center[None, :]]
    occ = scenario.occluder_triangles()
    if len(occ):
        pts.append(occ.reshape(-1, 3))
    for t in (0.0, scenario.duration):
        sub = scenario.subject_triangles(t)
        if len(sub):
            pts.append(sub.reshape(-1, 3))
    allp = np.concatenate(pts)
    return float(np.linalg.norm(allp.max(axis=0) - allp.min(axis=0))) or 1.0


def classify(points: np.ndarray, normals: np.ndarray, skip: np.ndarray, camera: Camera,
             world_tris: np.ndarray, eps: float):
    """Vectorised verdicts for world-space points; returns (codes, pixel coords)."""
    n = len(points)
    codes = np.zeros(n, dtype=np.int8)
    px = np.full(n, np.nan)
    py = np.full(n, np.nan)
    verdict_kernel(np.ascontiguousarray(points, dtype=np.float64), np.ascontiguousarray(normals, dtype=np.float64),
                   np.ascontiguousarray(skip, dtype=np.int64), np.asarray(camera.center, dtype=np.float64),
                   np.ascontiguousarray(camera.rotation), camera.focal, camera.width, camera.height,
                   camera.near, camera.far, np.ascontiguousarray(world_tris, dtype=np.float64), eps, codes, px, py)
    return codes, np.stack([px, py], axis=-1)


def visible(point: TexelSurfacePoint, camera: Camera, scenario: Scenario, t: float,
            eps: Optional[float] = None) -> Verdict:
    """Verdict for one reconstructed point (already posed at time t) seen from `camera`."""
    world = np.concatenate([scenario.subject_triangles(t), scenario.occluder_triangles()])
    eps = SELF_HIT_EPSILON * scene_scale(scenario) if eps is None else eps
    codes, _ = classify(point.position[None, :], point.normal[None, :], np.array([point.triangle]),
                        camera, world, eps)
    return Verdict(int(codes[0]))


def texel_verdict(point: TexelSurfacePoint, scenario: Scenario, t: float) -> VisibilityVerdict:
    left, right = scenario.cameras(t)
    return VisibilityVerdict(texel=point.texel, left=visible(point, left, scenario, t),
                             right=visible(point, right, scenario, t))

