"""Texel ownership: which triangle's UV footprint holds each texel center."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from ...core.errors import OverlapError
from ..palette import SIZE
from .coverage import covers, edge
from .mesh import LabeledMesh

log = logging.getLogger(__name__)

UNOWNED = -1
MAX_REPORTED_CONFLICTS = 4096
MARGIN_SEARCH = 16  # texels; larger gaps are reported as unbounded


@njit(cache=True)
def _rasterize_uv(uvs, size, owner, conflicts):
    """Write triangle ids into `owner`; returns the number of conflicting texels."""
    n_conf = 0
    for k in range(uvs.shape[0]):
        ax = uvs[k, 0, 0] * size
        ay = (1.0 - uvs[k, 0, 1]) * size
        bx = uvs[k, 1, 0] * size
        by = (1.0 - uvs[k, 1, 1]) * size
        cx = uvs[k, 2, 0] * size
        cy = (1.0 - uvs[k, 2, 1]) * size
        area = edge(ax, ay, bx, by, cx, cy)
        if area == 0.0:
            continue
        if area < 0.0:
            bx, cx = cx, bx
            by, cy = cy, by
        x0 = max(0, int(math.ceil(min(ax, bx, cx) - 0.5)))
        x1 = min(size - 1, int(math.floor(max(ax, bx, cx) - 0.5)))
        y0 = max(0, int(math.ceil(min(ay, by, cy) - 0.5)))
        y1 = min(size - 1, int(math.floor(max(ay, by, cy) - 0.5)))
        for y in range(y0, y1 + 1):
            py = y + 0.5
            for x in range(x0, x1 + 1):
                px = x + 0.5
                w0 = edge(bx, by, cx, cy, px, py)
                if not covers(w0, bx, by, cx, cy):
                    continue
                w1 = edge(cx, cy, ax, ay, px, py)
                if not covers(w1, cx, cy, ax, ay):
                    continue
                w2 = edge(ax, ay, bx, by, px, py)
                if not covers(w2, ax, ay, bx, by):
                    continue
                if owner[y, x] != -1:
                    if n_conf < conflicts.shape[0]:
                        conflicts[n_conf, 0] = x
                        conflicts[n_conf, 1] = y
                    n_conf += 1
                    continue
                owner[y, x] = k
    return n_conf


@dataclass
class PartIdentificationTexture:
    """4096x4096 part-id map (-1 for unowned) plus, when baked from a mesh, the triangle owner map."""
    part: np.ndarray                 # (SIZE, SIZE) int16
    parts: List[str]
    owner: Optional[np.ndarray] = None   # (SIZE, SIZE) int32 triangle ids
    conflicts: List[Tuple[int, int]] = field(default_factory=list)

    def owned_mask(self) -> np.ndarray:
        return self.part >= 0

    def owned_colors(self) -> np.ndarray:
        """Packed FCSP colors of every owned texel (identity mapping)."""
        return np.flatnonzero(self.part.ravel() >= 0).astype(np.uint32)


def _owner_map(mesh: LabeledMesh) -> Tuple[np.ndarray, List[Tuple[int, int]], int]:
    owner = np.full((SIZE, SIZE), UNOWNED, dtype=np.int32)
    conflicts = np.zeros((MAX_REPORTED_CONFLICTS, 2), dtype=np.int64)
    n = _rasterize_uv(np.ascontiguousarray(mesh.uvs, dtype=np.float64), SIZE, owner, conflicts)
    found = [(int(x), int(y)) for x, y in conflicts[: min(n, MAX_REPORTED_CONFLICTS)]]
    return owner, found, int(n)


def _pidt_from_owner(mesh: LabeledMesh, owner: np.ndarray) -> np.ndarray:
    part = np.full(owner.shape, UNOWNED, dtype=np.int16)
    owned = owner >= 0
    part[owned] = mesh.part_ids[owner[owned]]
    return part


def texel_ownership(mesh: LabeledMesh) -> PartIdentificationTexture:
    """Rasterize every triangle in UV space at 4096x4096 using pixel-center coverage.

    Raises OverlapError when two triangles claim the same texel.
    """
    owner, conflicts, n = _owner_map(mesh)
    if n:
        raise OverlapError(conflicts)
    pidt = PartIdentificationTexture(part=_pidt_from_owner(mesh, owner), parts=list(mesh.parts), owner=owner)
    log.info("%s: %d texels owned", mesh.name, int(np.count_nonzero(owner >= 0)))
    return pidt


@dataclass
class UVLayoutReport:
    valid: bool
    overlaps: List[Tuple[int, int]]
    overlap_count: int
    min_margin: float            # texels of empty space between distinct faces; inf if none nearby
    warnings: List[str]


def _boundary(labels: np.ndarray) -> np.ndarray:
    """Owned texels with a 4-neighbour that is unowned or belongs to another face."""
    padded = np.pad(labels, 1, constant_values=UNOWNED)
    core = padded[1:-1, 1:-1]
    edge_mask = np.zeros(labels.shape, dtype=bool)
    for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        nb = padded[1 + dy: 1 + dy + labels.shape[0], 1 + dx: 1 + dx + labels.shape[1]]
        edge_mask |= nb != core
    return edge_mask & (labels >= 0)


def _min_margin(face_of_texel: np.ndarray) -> float:
    ys, xs = np.nonzero(_boundary(face_of_texel))
    if xs.size == 0:
        return math.inf
    labels = face_of_texel[ys, xs]
    if np.unique(labels).size < 2:
        return math.inf
    pts = np.column_stack([xs, ys]).astype(np.float64)
    pairs = cKDTree(pts).query_pairs(r=MARGIN_SEARCH + 1, p=np.inf, output_type="ndarray")
    if pairs.size == 0:
        return math.inf
    other = labels[pairs[:, 0]] != labels[pairs[:, 1]]
    if not np.any(other):
        return math.inf
    p = pairs[other]
    cheb = np.max(np.abs(pts[p[:, 0]] - pts[p[:, 1]]), axis=1)
    return float(cheb.min() - 1.0)


def validate_uv_layout(mesh: LabeledMesh) -> UVLayoutReport:
    """Overlap check plus the tightest gap between distinct polygons, in texels."""
    owner, conflicts, n = _owner_map(mesh)
    warnings: List[str] = []
    face_of_texel = np.full(owner.shape, UNOWNED, dtype=np.int32)
    owned = owner >= 0
    face_of_texel[owned] = mesh.source_face[owner[owned]]
    margin = _min_margin(face_of_texel)
    if n:
        warnings.append(f"{n} texel(s) are owned by more than one triangle")
    if margin < 1.0:
        warnings.append(f"faces are {margin:g} texel(s) apart; colors may bleed between them")
    for w in warnings:
        log.warning("%s: %s", mesh.name, w)
    return UVLayoutReport(valid=n == 0, overlaps=conflicts, overlap_count=n, min_margin=margin, warnings=warnings)
