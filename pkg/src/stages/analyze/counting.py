"""Per-image color counting over a capture directory.

Each tile counts a color at most once, whatever the number of pixels carrying
it. Counts live in a dense array indexed by the packed color, which is also
the FCSP texel index.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ...core.errors import ManifestError, StorageError
from ..capture import CaptureRecord, Manifest, decode_tile, is_empty
from ..palette import COLOR_COUNT

log = logging.getLogger(__name__)

COUNTS_NAME = "counts.npz"


@dataclass
class ExposureCounts:
    counts: np.ndarray = field(default_factory=lambda: np.zeros(COLOR_COUNT, dtype=np.uint32))
    images_processed: int = 0     # every tile of the capture, decoded or trimmed
    images_trimmed: int = 0       # tiles classified empty by size
    tiles_decoded: int = 0
    unowned_images: int = 0       # decoded tiles holding at least one unowned color

    def merge(self, other: "ExposureCounts") -> "ExposureCounts":
        self.counts += other.counts
        self.images_processed += other.images_processed
        self.images_trimmed += other.images_trimmed
        self.tiles_decoded += other.tiles_decoded
        self.unowned_images += other.unowned_images
        return self

    @property
    def max(self) -> int:
        return int(self.counts.max()) if self.counts.size else 0

    def save(self, path: Path) -> Path:
        nz = np.flatnonzero(self.counts).astype(np.uint32)
        np.savez_compressed(
            path, colors=nz, values=self.counts[nz],
            meta=np.array([self.images_processed, self.images_trimmed, self.tiles_decoded, self.unowned_images],
                          dtype=np.int64),
        )
        return Path(path)

    @classmethod
    def load(cls, path: Path) -> "ExposureCounts":
        try:
            with np.load(path) as z:
                out = cls()
                out.counts[z["colors"]] = z["values"]
                out.images_processed, out.images_trimmed, out.tiles_decoded, out.unowned_images = (
                    int(v) for v in z["meta"]
                )
        except (OSError, KeyError, ValueError) as e:
            raise StorageError(f"cannot read counts from {path}: {e}", stage="analyze") from e
        return out


def count_image(image: np.ndarray, ignore: int, counts: ExposureCounts,
                owned: Optional[np.ndarray] = None) -> ExposureCounts:
    """Add 1 for every distinct non-ignore color of a packed (H, W) uint32 image."""
    colors = np.unique(image)
    colors = colors[colors != ignore]
    counts.counts[colors] += 1
    if owned is not None and colors.size and not np.all(owned[colors]):
        counts.unowned_images += 1
    return counts


def _count_records(root: Path, records: Sequence[CaptureRecord], ignore: int, threshold, no_trim: bool,
                   owned: Optional[np.ndarray]) -> ExposureCounts:
    out = ExposureCounts()
    for rec in records:
        out.images_processed += 1
        empty = is_empty(rec, threshold)
        out.images_trimmed += int(empty)
        if empty and not no_trim:
            continue
        path = root / rec.path
        try:
            data = path.read_bytes()
        except OSError as e:
            raise ManifestError(f"manifest lists {rec.path} but it cannot be read: {e}") from e
        try:
            image = decode_tile(data, rec.path)
        except StorageError as e:
            raise StorageError(*e.args, stage="analyze") from e
        count_image(image, ignore, out, owned)
        out.tiles_decoded += 1
    return out


def _count_chunk(job: Tuple) -> ExposureCounts:
    return _count_records(*job)


def _chunks(records: List[CaptureRecord], n: int) -> List[List[CaptureRecord]]:
    step = -(-len(records) // n)
    return [records[i:i + step] for i in range(0, len(records), step)]


def aggregate(manifest: Manifest, workers: int = 1, no_trim: bool = False,
              owned: Optional[np.ndarray] = None, progress: bool = True) -> ExposureCounts:
    """Count every non-trimmed tile of a capture once; identical for any worker count."""
    records = sorted(manifest.records, key=lambda r: r.path)
    missing = [r.path for r in records if not (manifest.root / r.path).is_file()]
    if missing:
        raise ManifestError(f"{len(missing)} tile(s) listed in the manifest are missing, first: {missing[0]}")

    total = ExposureCounts()
    if workers <= 1 or len(records) < 2:
        for chunk in tqdm(_chunks(records, 64) if records else [],
                          desc=f"analyze {manifest.scenario}", unit="chunk", disable=not progress):
            total.merge(_count_records(manifest.root, chunk, manifest.ignore_color, manifest.threshold,
                                       no_trim, owned))
    else:
        jobs = [(manifest.root, chunk, manifest.ignore_color, manifest.threshold, no_trim, owned)
                for chunk in _chunks(records, workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in tqdm(pool.map(_count_chunk, jobs), total=len(jobs),
                             desc=f"analyze {manifest.scenario}", unit="chunk", disable=not progress):
                total.merge(part)
    log.info("counted %d of %d tiles (%d classified empty)",
             total.tiles_decoded, total.images_processed, total.images_trimmed)
    if total.unowned_images:
        log.warning("%d tile(s) hold colors outside the owned texel set", total.unowned_images)
    return total
