"""
Pipeline runner for unwrapped full-color-space recording.

Usage (from repo root):
    python -m src.cli run --scenario scenarios/scenario_a.yaml --scale 10 --workers 4
    python -m src.cli bake-pidt --mesh scenarios/meshes/boxcar.obj --out out/pidt
    python -m src.cli report out/analysis/stats.json

Outputs (per run, under --out):
    palette/fcsp.png                     # full color space palette
    pidt/{pidt.png,parts.json}           # part identification texture + census
    captures/S*_f*_{L,R}_r*c*.png        # tiles + manifest.json
    analysis/{stats.json,counts.npz,heatmap.png}
    run_log.jsonl                        # one metrics line per stage
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from importlib import import_module
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .core.cache import content_hash, is_fresh, read_metrics, write_stamp
from .core.config import RunConfig
from .core.errors import StrictColorError, UfcsrError
from .core.log import setup_logging
from .core.stage_spec import RunContext, StageSpec
from .report import add_arguments as add_report_arguments
from .report import run_report, to_table
from .stages.meshkit.part_map import DEFAULT_PART_MAP

log = logging.getLogger("src.cli")

EXIT_OK, EXIT_USAGE, EXIT_STAGE, EXIT_STRICT = 0, 1, 2, 3

# stage packages under src/stages, in pipeline order
PIPELINE = ["palette", "meshkit", "capture", "analyze"]
RUN_LOG = "run_log.jsonl"
VEHICLE_PARTS = "vehicle"
PARTS_HELP = f"Part-naming map (YAML), or `{VEHICLE_PARTS}` for the bundled vehicle taxonomy."


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def part_map_arg(value: str) -> Path:
    """`--parts` value: a YAML path, or `vehicle` for the bundled passenger-vehicle taxonomy."""
    return DEFAULT_PART_MAP if value == VEHICLE_PARTS else Path(value)


def load_stage(name: str) -> StageSpec:
    return getattr(import_module(f".stages.{name}", __package__), "STAGE")


def run_stages(cfg: RunConfig, names: Sequence[str], progress: bool = True) -> List[Dict[str, Any]]:
    """Run stages in order, skipping any whose input hash matches its stamp."""
    cfg.out.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(config=cfg, progress=progress)
    rows: List[Dict[str, Any]] = []
    with open(cfg.out / RUN_LOG, "a", encoding="utf-8") as f_jsonl:
        for name in names:
            stage = load_stage(name)
            stage_dir = ctx.stage_dir(stage.name)
            digest = content_hash(stage.inputs(ctx))
            start = time.time()
            cached = not cfg.force and is_fresh(stage_dir, digest, stage.outputs(ctx))
            if cached:
                metrics = read_metrics(stage_dir)
                log.info("stage %s is up to date; skipped", stage.name, extra={"stage": stage.name})
            else:
                log.info("stage %s started", stage.name, extra={"stage": stage.name})
                metrics = stage.run(ctx)
                write_stamp(stage_dir, digest, metrics)
            row = {"stage": stage.name, "cached": cached, "elapsed_sec": round(time.time() - start, 3), **metrics}
            f_jsonl.write(json.dumps(row, ensure_ascii=False, default=str) + "\n")
            f_jsonl.flush()
            rows.append(row)
    return rows


def print_summary(rows: List[Dict[str, Any]], cfg: RunConfig, console: Console) -> None:
    from .stages.analyze import STATS_NAME, read_stats

    by = {r["stage"]: r for r in rows}
    cap = by.get("captures", {})
    ana = by.get("analysis", {})
    table = Table(title="Run summary", show_header=False)
    table.add_column("", style="bold")
    table.add_column("", justify="right")
    for label, value in (
        ("Frames per eye", cap.get("frames")),
        ("Captures", cap.get("captures")),
        ("Tiles", cap.get("tiles")),
        ("Trimmed", ana.get("trimmed")),
        ("Grand total", ana.get("grand_total")),
    ):
        if value is not None:
            table.add_row(label, f"{value:,}")
    for r in rows:
        table.add_row(f"{r['stage']} (s)", f"{r['elapsed_sec']:.2f}" + (" cached" if r["cached"] else ""))
    console.print(table)
    stats = cfg.out / "analysis" / STATS_NAME
    if stats.exists():
        console.print(to_table(read_stats(stats)))


def _config(args: argparse.Namespace, **fields: Any) -> RunConfig:
    keys = ("scenario", "mesh", "parts", "out", "scale", "no_trim", "strict_colors", "dump_frames", "workers", "force")
    values = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    values.update(fields)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise UsageError(str(e)) from e


def cmd_gen_palette(args, progress, console) -> None:
    run_stages(_config(args), ["palette"], progress)
    console.print(f"Wrote:\n  {args.out / 'palette' / 'fcsp.png'}")


def cmd_bake_pidt(args, progress, console) -> None:
    from .stages.meshkit import bake_pidt

    mesh, _, c = bake_pidt(args.mesh, args.parts, args.out)
    console.print(f"{mesh.triangle_count} triangles, {len(mesh.parts)} parts, {c.total:,} owned texels")
    for name, n in c.as_rows():
        console.print(f"  {name}: {n:,}")


def cmd_render(args, progress, console) -> None:
    cfg = _config(args)
    rows = run_stages(cfg, ["meshkit", "capture"], progress)
    print_summary(rows, cfg, console)


def cmd_analyze(args, progress, console) -> None:
    from .stages.analyze import analyze_capture

    report, counts = analyze_capture(args.captures, args.pidt, args.out, workers=args.workers,
                                     no_trim=args.no_trim, strict_colors=args.strict_colors, progress=progress)
    console.print(f"{counts.images_processed:,} tiles, {counts.images_trimmed:,} trimmed, "
                  f"grand total {report.grand_total:,}")
    console.print(to_table(report))


def cmd_heatmap(args, progress, console) -> None:
    from .stages.analyze import ExposureCounts, emit_heatmap

    texture = emit_heatmap(ExposureCounts.load(args.counts))
    texture.save(args.out)
    console.print(f"Wrote {args.out} (max count {texture.max_value})")


def cmd_oracle_check(args, progress, console) -> None:
    from .stages.oracle import oracle_check
    from .stages.scene import load_scenario

    cfg = _config(args)
    scenario = load_scenario(cfg.scenario).with_scale(cfg.scale)
    report = oracle_check(scenario, cfg.out / "oracle", workers=cfg.workers,
                          tile_emulation=args.tile_emulation, progress=progress)
    console.print(f"Agreement {report.agreement:.4%} ({report.agreeing:,}/{report.owned_texels:,} texels); "
                  f"{report.disagreeing:,} disagreements, {report.near_silhouette:,} next to a silhouette")
    console.print(f"Disagreement raster: {cfg.out / 'oracle' / 'disagreement.png'}")


def cmd_run(args, progress, console) -> None:
    cfg = _config(args)
    rows = run_stages(cfg, PIPELINE, progress)
    print_summary(rows, cfg, console)


def cmd_report(args, progress, console) -> None:
    run_report(args.stats, markdown=args.markdown, console=console)


def _add_run_flags(p: argparse.ArgumentParser, scenario: bool = True) -> None:
    if scenario:
        p.add_argument("--scenario", type=Path, required=True, help="Scenario YAML file.")
    p.add_argument("--out", type=Path, default=Path("out"), help="Output root.")
    p.add_argument("--scale", type=int, default=1, help="Tile size divisor (10 -> 128x162 tiles).")
    p.add_argument("--workers", type=int, default=1, help="Process pool size.")
    p.add_argument("--force", action="store_true", help="Ignore stage caches.")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ufcsr", description="Unwrapped full-color-space recording toolkit.")
    parser.add_argument("--log-json", action="store_true", help="One JSON object per log line.")
    parser.add_argument("--log-level", default="INFO")
    parser.add_argument("--quiet", action="store_true", help="Warnings only, no progress bars.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-palette", help="Write the 4096x4096 full color space palette.")
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_gen_palette)

    p = sub.add_parser("bake-pidt", help="Bake the part identification texture of a mesh.")
    p.add_argument("--mesh", type=Path, required=True)
    p.add_argument("--parts", type=part_map_arg, default=None, help=PARTS_HELP)
    p.add_argument("--out", type=Path, default=Path("out/pidt"))
    p.set_defaults(func=cmd_bake_pidt)

    p = sub.add_parser("render", help="Capture every tile of a scenario.")
    _add_run_flags(p)
    p.add_argument("--parts", type=part_map_arg, default=None, help=PARTS_HELP)
    p.add_argument("--dump-frames", action="store_true", help="Also write full eye frames.")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("analyze", help="Count colors in a capture directory.")
    p.add_argument("--captures", type=Path, required=True)
    p.add_argument("--pidt", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("out/analysis"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-trim", action="store_true", help="Decode empty tiles too.")
    p.add_argument("--strict-colors", action="store_true", help="Fail on colors outside the owned texels.")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("heatmap", help="Render counts as a plasma heatmap texture.")
    p.add_argument("--counts", type=Path, required=True, help="counts.npz written by analyze.")
    p.add_argument("--out", type=Path, required=True, help="Output PNG.")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("oracle-check", help="Compare raster counts with the ray-cast oracle.")
    _add_run_flags(p)
    p.add_argument("--tile-emulation", action="store_true", help="Count every tile a texel's footprint touches.")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("run", help="palette -> pidt -> capture -> analysis.")
    _add_run_flags(p)
    p.add_argument("--parts", type=part_map_arg, default=None, help=PARTS_HELP)
    p.add_argument("--no-trim", action="store_true")
    p.add_argument("--strict-colors", action="store_true")
    p.add_argument("--dump-frames", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="Top-5 part tables from stats documents.")
    add_report_arguments(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("WARNING" if args.quiet else args.log_level, json_logs=args.log_json)
    progress = not args.quiet and sys.stderr.isatty()
    console = Console()
    try:
        args.func(args, progress, console)
    except UsageError as e:
        print(f"ufcsr: invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StrictColorError as e:
        print(f"ufcsr: {e}", file=sys.stderr)
        return EXIT_STRICT
    except UfcsrError as e:
        print(f"ufcsr: {e}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
