from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ...core.errors import StrictColorError
from ...core.stage_spec import RunContext, StageSpec
from ..capture import MANIFEST_NAME, Manifest
from ..meshkit import PIDT_IMAGE, PIDT_SIDECAR, read_pidt
from .counting import COUNTS_NAME, ExposureCounts, aggregate, count_image
from .heatmap import HEATMAP_NAME, HeatmapTexture, emit_heatmap, load_lut, plasma, plasma_colors
from .stats import STATS_NAME, PartStats, PartStatsReport, part_stats, read_stats, write_stats

__all__ = [
    "COUNTS_NAME", "HEATMAP_NAME", "STATS_NAME",
    "ExposureCounts", "HeatmapTexture", "PartStats", "PartStatsReport",
    "aggregate", "analyze_capture", "count_image", "emit_heatmap", "load_lut", "part_stats",
    "plasma", "plasma_colors", "read_stats", "write_stats",
]

log = logging.getLogger(__name__)


def analyze_capture(
    captures_dir: Path,
    pidt_dir: Path,
    out_dir: Path,
    workers: int = 1,
    no_trim: bool = False,
    strict_colors: bool = False,
    progress: bool = True,
    manifest: Optional[Manifest] = None,
) -> Tuple[PartStatsReport, ExposureCounts]:
    """Manifest + tiles + PIdT -> stats.json, counts.npz and heatmap.png in `out_dir`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = manifest or Manifest.read(captures_dir)
    pidt, _, recorded = read_pidt(pidt_dir)
    owned = pidt.owned_mask().ravel()

    counts = aggregate(manifest, workers=workers, no_trim=no_trim, owned=owned, progress=progress)
    provenance = {
        "rig": manifest.rig,
        "schedule": manifest.schedule,
        "ignore_color": f"#{manifest.ignore_color:06X}",
        "threshold_bytes": manifest.threshold.length,
        "encoder": manifest.encoder,
    }
    report = part_stats(counts, pidt, recorded, scenario=manifest.scenario, provenance=provenance)
    if strict_colors and (counts.unowned_images or report.unowned_colors):
        raise StrictColorError(
            f"{report.unowned_colors} unowned color(s) in {counts.unowned_images} tile(s)"
        )
    write_stats(report, out_dir / STATS_NAME)
    counts.save(out_dir / COUNTS_NAME)
    emit_heatmap(counts).save(out_dir / HEATMAP_NAME)
    return report, counts


def run(ctx: RunContext) -> Dict[str, Any]:
    cfg = ctx.config
    report, counts = analyze_capture(
        ctx.stage_dir("captures"), ctx.stage_dir("pidt"), ctx.stage_dir("analysis"),
        workers=cfg.workers, no_trim=cfg.no_trim, strict_colors=cfg.strict_colors,
        progress=ctx.progress, manifest=ctx.artifacts.get("manifest"),
    )
    ctx.artifacts["stats"] = report
    return {"tiles": counts.images_processed, "trimmed": counts.images_trimmed,
            "decoded": counts.tiles_decoded, "grand_total": report.grand_total}


def _inputs(ctx: RunContext) -> List[Any]:
    cfg = ctx.config
    pidt = ctx.stage_dir("pidt")
    return [ctx.stage_dir("captures") / MANIFEST_NAME, pidt / PIDT_IMAGE, pidt / PIDT_SIDECAR,
            cfg.no_trim, cfg.strict_colors]


def _outputs(ctx: RunContext) -> List[Path]:
    d = ctx.stage_dir("analysis")
    return [d / STATS_NAME, d / COUNTS_NAME, d / HEATMAP_NAME]


STAGE = StageSpec(name="analysis", run=run, inputs=_inputs, outputs=_outputs)
