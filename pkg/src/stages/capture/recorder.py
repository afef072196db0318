"""Render a scenario's schedule through both eyes and store every tile.

Frames are independent, so they fan out over a process pool; each worker
builds its own Renderer once and writes only the files of its frames.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ...core.errors import StorageError
from ..palette import DEFAULT_IGNORE_COLOR, unpack_image, write_png
from ..raster import Renderer, split_tiles
from ..scene import EYES, Scenario
from .encoder import compute_threshold, encode_tile, encoder_settings
from .manifest import CaptureRecord, Manifest, tile_name

log = logging.getLogger(__name__)

FRAMES_DIR = "frames"

_renderer: Optional[Renderer] = None


def _init_worker(scenario: Scenario, ignore: int, owner: Optional[np.ndarray]) -> None:
    global _renderer
    _renderer = Renderer(scenario, ignore_color=ignore, owner=owner)


def _write(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e


def capture_frame(renderer: Renderer, frame_index: int, t: float, out_dir: Path,
                  dump_frames: bool = False) -> List[CaptureRecord]:
    """Render both eyes at time t, split into tiles, encode and write them."""
    sc = renderer.scenario
    ignore = renderer.ignore_color
    threshold = compute_threshold(sc.rig.tile_size, ignore)
    records: List[CaptureRecord] = []
    for eye in EYES:
        frame = renderer.render(t, eye, frame_index)
        if dump_frames:
            write_png(unpack_image(frame.pixels), out_dir / FRAMES_DIR / f"S{sc.id}_f{frame_index:04d}_{eye}.png")
        for tile in split_tiles(frame, sc.rig.tiles):
            name = tile_name(sc.id, frame_index, eye, tile.row, tile.col)
            data = encode_tile(tile.pixels)
            _write(out_dir / name, data)
            keep = len(data) <= threshold.length and bool(np.any(tile.pixels != ignore))
            if keep:
                log.warning("%s holds data but encodes to %d bytes (threshold %d); kept", name, len(data), threshold.length,
                            extra={"stage": "capture", "frame": frame_index, "eye": eye})
            records.append(CaptureRecord(path=name, scenario=sc.id, frame=frame_index, eye=eye,
                                         row=tile.row, col=tile.col, bytes=len(data), keep=keep))
    return records


def _capture_in_worker(job: Tuple[int, float, str, bool]) -> List[CaptureRecord]:
    frame_index, t, out_dir, dump = job
    return capture_frame(_renderer, frame_index, t, Path(out_dir), dump)


def capture_scenario(
    scenario: Scenario,
    out_dir: Path,
    ignore_color: int = DEFAULT_IGNORE_COLOR,
    owner: Optional[np.ndarray] = None,
    workers: int = 1,
    dump_frames: bool = False,
    progress: bool = True,
) -> Manifest:
    """Capture every (frame, eye, tile) of the schedule into `out_dir` and write its manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if dump_frames:
        (out_dir / FRAMES_DIR).mkdir(exist_ok=True)
    for stale in out_dir.glob(f"S{scenario.id}_f*.png"):
        stale.unlink()

    schedule = scenario.schedule()
    jobs = [(k, t, str(out_dir), dump_frames) for k, t in enumerate(schedule.times)]
    bar = dict(total=len(jobs), desc=f"capture {scenario.id}", unit="frame", disable=not progress)
    records: List[CaptureRecord] = []
    if workers <= 1:
        renderer = Renderer(scenario, ignore_color=ignore_color, owner=owner)
        for k, t, _, _ in tqdm(jobs, **bar):
            records.extend(capture_frame(renderer, k, t, out_dir, dump_frames))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(scenario, ignore_color, owner)) as pool:
            for recs in tqdm(pool.map(_capture_in_worker, jobs), **bar):
                records.extend(recs)

    threshold = compute_threshold(scenario.rig.tile_size, ignore_color)
    manifest = Manifest(
        scenario=scenario.id,
        threshold=threshold,
        ignore_color=ignore_color,
        encoder=encoder_settings(),
        rig=scenario.rig.describe(),
        schedule={
            "rate": schedule.rate,
            "duration": scenario.duration,
            "frames": schedule.frames,
            "captures": schedule.captures,
            "tile_files": schedule.tile_files,
        },
        records=sorted(records, key=lambda r: r.path),
        root=out_dir,
    )
    manifest.write(out_dir)
    log.info("captured %d tiles for scenario %s (%d frames x %d eyes)",
             len(records), scenario.id, schedule.frames, len(EYES))
    return manifest
