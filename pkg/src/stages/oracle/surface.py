"""Texel -> surface point reconstruction through the affine UV -> barycentric map."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ...core.errors import OwnershipError, SingularMappingError
from ..meshkit import LabeledMesh, texel_ownership
from ..palette import SIZE, TexelIndex
from ..scene import Pose, place

SINGULAR_DET = 1e-18


@dataclass(frozen=True)
class TexelSurfacePoint:
    texel: TexelIndex
    triangle: int
    barycentric: Tuple[float, float, float]
    position: np.ndarray    # world space when a pose was given, model space otherwise
    normal: np.ndarray      # unit geometric normal, same frame as position


def texel_center_uv(x: np.ndarray | int, y: np.ndarray | int) -> np.ndarray:
    return np.stack([(np.asarray(x) + 0.5) / SIZE, 1.0 - (np.asarray(y) + 0.5) / SIZE], axis=-1)


def barycentric(uv_tri: np.ndarray, uv: np.ndarray) -> np.ndarray:
    """(..., 3, 2) triangles and (..., 2) points -> (..., 3) barycentric weights."""
    a, b, c = uv_tri[..., 0, :], uv_tri[..., 1, :], uv_tri[..., 2, :]
    e1, e2, q = b - a, c - a, uv - a
    det = e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0]
    if np.any(np.abs(det) < SINGULAR_DET):
        raise SingularMappingError("UV triangle has (near) zero area")
    l1 = (q[..., 0] * e2[..., 1] - q[..., 1] * e2[..., 0]) / det
    l2 = (e1[..., 0] * q[..., 1] - e1[..., 1] * q[..., 0]) / det
    return np.stack([1.0 - l1 - l2, l1, l2], axis=-1)


def triangle_normals(tris: np.ndarray) -> np.ndarray:
    n = np.cross(tris[..., 1, :] - tris[..., 0, :], tris[..., 2, :] - tris[..., 0, :])
    length = np.linalg.norm(n, axis=-1, keepdims=True)
    return np.divide(n, length, out=np.zeros_like(n), where=length > 0)


def texel_to_surface(mesh: LabeledMesh, texel: TexelIndex | Tuple[int, int],
                     owner: Optional[np.ndarray] = None, pose: Optional[Pose] = None) -> TexelSurfacePoint:
    """Surface point under the center of `texel`, placed by `pose` when given."""
    x, y = texel
    if owner is None:
        owner = texel_ownership(mesh).owner
    tid = int(owner[y, x])
    if tid < 0:
        raise OwnershipError(f"texel ({x},{y}) is not owned by any triangle")
    lam = barycentric(mesh.uvs[tid], texel_center_uv(x, y))
    tri = mesh.corners()[tid]
    if pose is not None:
        tri = place(tri, pose)
    return TexelSurfacePoint(
        texel=TexelIndex(x, y),
        triangle=tid,
        barycentric=tuple(float(v) for v in lam),
        position=lam @ tri,
        normal=triangle_normals(tri),
    )


@dataclass
class SurfaceSamples:
    """Every owned texel of a mesh, reconstructed in model space."""
    texels: np.ndarray      # (N,) linear texel index == FCSP color
    triangles: np.ndarray   # (N,) int32
    positions: np.ndarray   # (N, 3) texel centers
    corners: np.ndarray     # (N, 4, 3) texel corners, extrapolated on the same triangle plane

    def __len__(self) -> int:
        return int(self.texels.size)


def surface_samples(mesh: LabeledMesh, owner: np.ndarray) -> SurfaceSamples:
    linear = np.flatnonzero(owner.ravel() >= 0)
    y, x = np.divmod(linear, SIZE)
    tids = owner.ravel()[linear].astype(np.int32)
    uv_tris = mesh.uvs[tids]
    tris = mesh.corners()[tids]
    centers = np.einsum("nk,nkj->nj", barycentric(uv_tris, texel_center_uv(x, y)), tris)
    corners = np.empty((linear.size, 4, 3))
    for i, (dx, dy) in enumerate(((0, 0), (1, 0), (1, 1), (0, 1))):
        uv = np.stack([(x + dx) / SIZE, 1.0 - (y + dy) / SIZE], axis=-1)
        corners[:, i] = np.einsum("nk,nkj->nj", barycentric(uv_tris, uv), tris)
    return SurfaceSamples(texels=linear.astype(np.int64), triangles=tids, positions=centers, corners=corners)
