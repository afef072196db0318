from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List

from ...core.stage_spec import RunContext, StageSpec
from .fcsp import (  # noqa: F401
    COLOR_COUNT,
    DEFAULT_IGNORE_COLOR,
    SIZE,
    TexelIndex,
    color_census,
    color_to_index,
    generate_fcsp,
    index_to_color,
    pack_image,
    palette_codes,
    read_png,
    save_fcsp,
    select_ignore_color,
    unpack_image,
    unpack_rgb,
    write_png,
)


def _fcsp_path(ctx: RunContext) -> Path:
    return ctx.stage_dir("palette") / "fcsp.png"


def run(ctx: RunContext) -> Dict[str, Any]:
    path = save_fcsp(_fcsp_path(ctx))
    ctx.artifacts["fcsp"] = path
    return {"path": str(path), "colors": COLOR_COUNT}


def _inputs(ctx: RunContext) -> List[Any]:
    return ["fcsp", SIZE]


def _outputs(ctx: RunContext) -> List[Path]:
    return [_fcsp_path(ctx)]


STAGE = StageSpec(name="palette", run=run, inputs=_inputs, outputs=_outputs)
