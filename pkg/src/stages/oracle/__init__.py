from __future__ import annotations

import logging
from pathlib import Path

from ..analyze import aggregate
from ..capture import capture_scenario
from ..meshkit import texel_ownership
from ..palette import select_ignore_color
from ..scene import Scenario
from .reference import MAX_PAIRS, OracleReport, compare_counts, oracle_counts, raster_silhouettes
from .surface import SurfaceSamples, TexelSurfacePoint, barycentric, surface_samples, texel_to_surface
from .visibility import SELF_HIT_EPSILON, Verdict, VisibilityVerdict, classify, scene_scale, texel_verdict, visible

__all__ = [
    "MAX_PAIRS", "SELF_HIT_EPSILON",
    "OracleReport", "SurfaceSamples", "TexelSurfacePoint", "Verdict", "VisibilityVerdict",
    "barycentric", "classify", "compare_counts", "oracle_check", "oracle_counts", "raster_silhouettes", "scene_scale",
    "surface_samples", "texel_to_surface", "texel_verdict", "visible",
]

log = logging.getLogger(__name__)

DISAGREEMENT_NAME = "disagreement.png"


def oracle_check(scenario: Scenario, out_dir: Path, workers: int = 1, tile_emulation: bool = False,
                 progress: bool = True) -> OracleReport:
    """Capture + count the scenario, run the ray-cast oracle, and compare texel by texel."""
    out_dir = Path(out_dir)
    mesh = scenario.subject
    pidt = texel_ownership(mesh)
    ignore = select_ignore_color(pidt.owned_mask().ravel())
    manifest = capture_scenario(scenario, out_dir / "captures", ignore_color=ignore, owner=pidt.owner,
                                workers=workers, progress=progress)
    raster = aggregate(manifest, workers=workers, owned=pidt.owned_mask().ravel(), progress=progress)
    reference = oracle_counts(scenario, mesh, pidt.owner, tile_emulation=tile_emulation, progress=progress)
    silhouette = raster_silhouettes(scenario, pidt.owner, ignore_color=ignore, progress=progress)
    report = compare_counts(raster, reference, pidt.owner, silhouette)
    report.save_raster(out_dir / DISAGREEMENT_NAME)
    log.info("oracle agreement %.4f (%d/%d texels, %d disagreements near a silhouette)",
             report.agreement, report.agreeing, report.owned_texels, report.near_silhouette)
    return report
