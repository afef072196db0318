from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List

from ...core.stage_spec import RunContext, StageSpec
from ..meshkit import PIDT_IMAGE, mesh_inputs, read_pidt
from ..palette import select_ignore_color
from ..scene import Scenario, load_scenario
from .encoder import (
    PNG_SETTINGS,
    SAMPLE_COLORS,
    TrimThreshold,
    compute_threshold,
    decode_tile,
    encode_tile,
    encoder_settings,
)
from .manifest import MANIFEST_NAME, CaptureRecord, Manifest, is_empty, tile_name
from .recorder import capture_frame, capture_scenario

__all__ = [
    "MANIFEST_NAME", "PNG_SETTINGS", "SAMPLE_COLORS", "CaptureRecord", "Manifest", "TrimThreshold",
    "capture_frame", "capture_scenario", "compute_threshold", "decode_tile", "encode_tile",
    "encoder_settings", "is_empty", "scaled_scenario", "tile_name",
]


def scaled_scenario(ctx: RunContext) -> Scenario:
    """The run's scenario at the configured scale, loaded once per run."""
    sc = ctx.artifacts.get("scenario")
    if sc is None:
        sc = load_scenario(ctx.config.scenario).with_scale(ctx.config.scale)
        ctx.artifacts["scenario"] = sc
    return sc


def run(ctx: RunContext) -> Dict[str, Any]:
    cfg = ctx.config
    sc = scaled_scenario(ctx)
    pidt = ctx.artifacts.get("pidt")
    if pidt is None:
        pidt, _, _ = read_pidt(ctx.stage_dir("pidt"))
    ignore = select_ignore_color(pidt.owned_mask().ravel())
    manifest = capture_scenario(sc, ctx.stage_dir("captures"), ignore_color=ignore, owner=pidt.owner,
                                workers=cfg.workers, dump_frames=cfg.dump_frames, progress=ctx.progress)
    ctx.artifacts["manifest"] = manifest
    s = manifest.schedule
    return {"frames": s["frames"], "captures": s["captures"], "tiles": len(manifest.records),
            "threshold_bytes": manifest.threshold.length, "ignore_color": f"#{ignore:06X}"}


def _inputs(ctx: RunContext) -> List[Any]:
    cfg = ctx.config
    mesh_path, _ = mesh_inputs(ctx)
    return [Path(cfg.scenario), mesh_path, ctx.stage_dir("pidt") / PIDT_IMAGE, cfg.scale, cfg.dump_frames]


def _outputs(ctx: RunContext) -> List[Path]:
    return [ctx.stage_dir("captures") / MANIFEST_NAME]


STAGE = StageSpec(name="captures", run=run, inputs=_inputs, outputs=_outputs)
