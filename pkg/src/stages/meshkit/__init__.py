from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ...core.stage_spec import RunContext, StageSpec
from .mesh import LabeledMesh, load_mesh, resolve_index
from .ownership import PartIdentificationTexture, UVLayoutReport, texel_ownership, validate_uv_layout
from .part_map import DEFAULT_PART_MAP, OTHERS, PIDT_BACKGROUND, PartMap, PartTable
from .pidt import (
    PIDT_IMAGE,
    PIDT_SIDECAR,
    TexelCensus,
    bake_pidt_image,
    census,
    parse_pidt_image,
    read_pidt,
    write_pidt,
)

__all__ = [
    "DEFAULT_PART_MAP", "OTHERS", "PIDT_BACKGROUND", "PIDT_IMAGE", "PIDT_SIDECAR",
    "LabeledMesh", "PartIdentificationTexture", "PartMap", "PartTable", "TexelCensus", "UVLayoutReport",
    "bake_pidt", "bake_pidt_image", "census", "load_mesh", "mesh_inputs", "parse_pidt_image", "read_pidt",
    "resolve_index", "texel_ownership", "validate_uv_layout", "write_pidt",
]


def bake_pidt(mesh_path: Path, parts_path: Optional[Path], out_dir: Path) -> Tuple[LabeledMesh, PartIdentificationTexture, TexelCensus]:
    """load_mesh -> texel_ownership -> PIdT image + sidecar in `out_dir`."""
    part_map = PartMap.load(parts_path)
    mesh = load_mesh(mesh_path, part_map)
    report = validate_uv_layout(mesh)
    pidt = texel_ownership(mesh)
    table = PartTable.build(mesh.parts, part_map.colors)
    write_pidt(pidt, table, out_dir)
    if report.warnings:
        (Path(out_dir) / "uv_warnings.txt").write_text("\n".join(report.warnings) + "\n", encoding="utf-8")
    return mesh, pidt, census(pidt)


def mesh_inputs(ctx: RunContext) -> Tuple[Path, Optional[Path]]:
    cfg = ctx.config
    if cfg.mesh is not None:
        return Path(cfg.mesh), cfg.parts
    from ..scene import load_scenario

    sc = load_scenario(cfg.scenario, load_subject=False)
    return sc.mesh_path, cfg.parts or sc.parts_path


def run(ctx: RunContext) -> Dict[str, Any]:
    mesh_path, parts_path = mesh_inputs(ctx)
    mesh, pidt, c = bake_pidt(mesh_path, parts_path, ctx.stage_dir("pidt"))
    ctx.artifacts.update(mesh=mesh, pidt=pidt)
    return {"triangles": mesh.triangle_count, "parts": len(mesh.parts), "owned_texels": c.total}


def _inputs(ctx: RunContext) -> List[Any]:
    mesh_path, parts_path = mesh_inputs(ctx)
    return [mesh_path, parts_path or "no-part-map"]


def _outputs(ctx: RunContext) -> List[Path]:
    d = ctx.stage_dir("pidt")
    return [d / PIDT_IMAGE, d / PIDT_SIDECAR]


STAGE = StageSpec(name="pidt", run=run, inputs=_inputs, outputs=_outputs)
