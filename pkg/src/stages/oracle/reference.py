"""Oracle exposure counts and their comparison against the raster pipeline."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import ndimage
from tqdm import tqdm

from ...core.errors import OracleScaleError
from ..analyze import ExposureCounts
from ..meshkit import LabeledMesh, texel_ownership
from ..palette import DEFAULT_IGNORE_COLOR, SIZE, unpack_image, write_png
from ..raster import Renderer
from ..scene import EYES, Scenario, place
from .surface import surface_samples, triangle_normals
from .visibility import SELF_HIT_EPSILON, Verdict, classify, scene_scale

log = logging.getLogger(__name__)

# owned texels x scene triangles, per (frame, eye)
MAX_PAIRS = 50_000_000

AGREE = 0x404040
DISAGREE_NEAR_SILHOUETTE = 0xFFD000
DISAGREE = 0xFF0000


def _tiles_touched(corners_px: np.ndarray, tile_w: int, tile_h: int, rows: int, cols: int) -> np.ndarray:
    """Distinct tiles overlapped by each texel's projected corner bounding box."""
    lo = np.nanmin(corners_px, axis=1)
    hi = np.nanmax(corners_px, axis=1)
    c0 = np.clip(np.floor(lo[:, 0] / tile_w), 0, cols - 1)
    c1 = np.clip(np.floor(hi[:, 0] / tile_w), 0, cols - 1)
    r0 = np.clip(np.floor(lo[:, 1] / tile_h), 0, rows - 1)
    r1 = np.clip(np.floor(hi[:, 1] / tile_h), 0, rows - 1)
    return ((c1 - c0 + 1) * (r1 - r0 + 1)).astype(np.uint32)


def oracle_counts(
    scenario: Scenario,
    mesh: Optional[LabeledMesh] = None,
    owner: Optional[np.ndarray] = None,
    tile_emulation: bool = False,
    max_pairs: int = MAX_PAIRS,
    progress: bool = True,
) -> ExposureCounts:
    """Count, per owned texel, the (frame, eye) pairs that see its center."""
    mesh = mesh if mesh is not None else scenario.subject
    out = ExposureCounts()
    schedule = scenario.schedule()
    out.images_processed = schedule.tile_files
    if mesh is None or mesh.triangle_count == 0:
        return out
    if owner is None:
        owner = texel_ownership(mesh).owner
    samples = surface_samples(mesh, owner)
    n_tris = mesh.triangle_count + len(scenario.occluder_triangles())
    if len(samples) * n_tris > max_pairs:
        raise OracleScaleError(
            f"{len(samples)} texels x {n_tris} triangles exceeds the oracle limit of {max_pairs} pairs; "
            "use a smaller mesh or scene"
        )

    eps = SELF_HIT_EPSILON * scene_scale(scenario)
    occluders = scenario.occluder_triangles()
    rows, cols = scenario.rig.tiles
    tile_w, tile_h = scenario.rig.tile_size
    skip = samples.triangles.astype(np.int64)
    for t in tqdm(schedule.times, desc=f"oracle {scenario.id}", unit="frame", disable=not progress):
        pose = scenario.pose(t)
        subject = place(mesh.corners(), pose)
        world = np.concatenate([subject, occluders]) if len(occluders) else subject
        normals = triangle_normals(subject)[samples.triangles]
        points = place(samples.positions, pose)
        for camera in scenario.cameras(t):
            codes, _ = classify(points, normals, skip, camera, world, eps)
            seen = codes == Verdict.VISIBLE
            if not tile_emulation:
                out.counts[samples.texels[seen]] += 1
                continue
            corners_px, _ = camera.project(place(samples.corners[seen], pose))
            out.counts[samples.texels[seen]] += _tiles_touched(corners_px, tile_w, tile_h, rows, cols)
    log.info("oracle counted %d texels over %d frames x %d eyes", len(samples), schedule.frames, len(EYES))
    return out


def raster_silhouettes(scenario: Scenario, owner: np.ndarray, ignore_color: int = DEFAULT_IGNORE_COLOR,
                       progress: bool = True) -> np.ndarray:
    """Owned texels within one texel of a raster visibility change in any (frame, eye) image.

    Per image, a texel is seen when its color lands on some pixel; the silhouette
    is every 3x3 block holding both seen and unseen texels (unowned count as unseen).
    """
    owned = owner >= 0
    near = np.zeros((SIZE, SIZE), dtype=bool)
    if not owned.any():
        return near
    rows = np.flatnonzero(owned.any(axis=1))
    cols = np.flatnonzero(owned.any(axis=0))
    block = (slice(max(rows[0] - 1, 0), min(rows[-1] + 2, SIZE)),
             slice(max(cols[0] - 1, 0), min(cols[-1] + 2, SIZE)))
    renderer = Renderer(scenario, ignore_color=ignore_color, owner=owner)
    seen = np.zeros(SIZE * SIZE, dtype=bool)
    schedule = scenario.schedule()
    for k, t in enumerate(tqdm(schedule.times, desc=f"silhouettes {scenario.id}", unit="frame",
                               disable=not progress)):
        for eye in EYES:
            colors = np.unique(renderer.render(t, eye, k).pixels)
            seen[:] = False
            seen[colors[colors != ignore_color]] = True
            s = seen.reshape(SIZE, SIZE)[block]
            near[block] |= ndimage.maximum_filter(s, size=3, mode="constant") != ndimage.minimum_filter(
                s, size=3, mode="constant")
    return near & owned


@dataclass
class OracleReport:
    owned_texels: int
    agreeing: int
    disagreeing: int
    near_silhouette: int    # disagreements within one texel of a rasterized silhouette
    raster: np.ndarray      # (SIZE, SIZE, 3) uint8 disagreement map

    @property
    def agreement(self) -> float:
        return self.agreeing / self.owned_texels if self.owned_texels else 1.0

    @property
    def all_near_silhouette(self) -> bool:
        return self.near_silhouette == self.disagreeing

    def save_raster(self, path: Path) -> Path:
        return write_png(self.raster, path)


def compare_counts(raster: ExposureCounts, oracle: ExposureCounts, owner: np.ndarray,
                   silhouette: np.ndarray) -> OracleReport:
    """Per-texel agreement of two count sets over the owned texels.

    `silhouette` is a (SIZE, SIZE) mask of texels next to a rasterized silhouette,
    as returned by raster_silhouettes.
    """
    owned = owner >= 0
    r = raster.counts.reshape(SIZE, SIZE).astype(np.int64)
    o = oracle.counts.reshape(SIZE, SIZE).astype(np.int64)
    differs = owned & (r != o)
    near = np.asarray(silhouette, dtype=bool)
    image = np.zeros((SIZE, SIZE), dtype=np.uint32)
    image[owned] = AGREE
    image[differs & near] = DISAGREE_NEAR_SILHOUETTE
    image[differs & ~near] = DISAGREE
    n_owned = int(owned.sum())
    n_diff = int(differs.sum())
    return OracleReport(
        owned_texels=n_owned,
        agreeing=n_owned - n_diff,
        disagreeing=n_diff,
        near_silhouette=int((differs & near).sum()),
        raster=unpack_image(image),
    )
