from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from ...core.errors import ConsistencyError, StorageError
from ..meshkit import PartIdentificationTexture, TexelCensus, census
from .counting import ExposureCounts

log = logging.getLogger(__name__)

STATS_NAME = "stats.json"
STATS_VERSION = 1


@dataclass(frozen=True)
class PartStats:
    name: str
    texels: int
    total: int
    peak: int
    average: float
    portion: float


@dataclass
class PartStatsReport:
    scenario: str
    parts: List[PartStats]
    grand_total: int
    images_processed: int
    images_trimmed: int
    unowned_colors: int = 0
    unowned_observations: int = 0
    provenance: Dict[str, Any] = field(default_factory=dict)

    def by_name(self) -> Dict[str, PartStats]:
        return {p.name: p for p in self.parts}


def part_stats(counts: ExposureCounts, pidt: PartIdentificationTexture, recorded: TexelCensus,
               scenario: str = "", provenance: Dict[str, Any] | None = None) -> PartStatsReport:
    """Per-part totals, peaks, averages and portions; unowned texels go to diagnostics."""
    actual = census(pidt)
    if actual.counts != recorded.counts or actual.total != recorded.total:
        raise ConsistencyError("texel census does not match the PIdT it was recorded for", stage="analyze")

    part = pidt.part.ravel().astype(np.int64)
    values = counts.counts.astype(np.int64)
    owned = part >= 0
    n = len(pidt.parts)
    totals = np.zeros(n, dtype=np.int64)
    peaks = np.zeros(n, dtype=np.int64)
    np.add.at(totals, part[owned], values[owned])
    np.maximum.at(peaks, part[owned], values[owned])

    stray = values[~owned]
    grand = int(totals.sum())
    rows = []
    for i, name in enumerate(pidt.parts):
        texels = recorded.counts[name]
        total = int(totals[i])
        rows.append(PartStats(
            name=name,
            texels=texels,
            total=total,
            peak=int(peaks[i]),
            average=total / texels if texels else 0.0,
            portion=total / grand if grand else 0.0,
        ))
    report = PartStatsReport(
        scenario=scenario,
        parts=sorted(rows, key=lambda p: p.name),
        grand_total=grand,
        images_processed=counts.images_processed,
        images_trimmed=counts.images_trimmed,
        unowned_colors=int(np.count_nonzero(stray)),
        unowned_observations=int(stray.sum()),
        provenance=provenance or {},
    )
    if report.unowned_colors:
        log.warning("%d unowned color(s) observed %d time(s); excluded from part totals",
                    report.unowned_colors, report.unowned_observations)
    return report


def write_stats(report: PartStatsReport, path: Path) -> Path:
    doc = {
        "format_version": STATS_VERSION,
        "scenario": report.scenario,
        "grand_total": report.grand_total,
        "images_processed": report.images_processed,
        "images_trimmed": report.images_trimmed,
        "parts": [asdict(p) for p in report.parts],
        "diagnostics": {
            "unowned_colors": report.unowned_colors,
            "unowned_observations": report.unowned_observations,
        },
        "provenance": report.provenance,
    }
    try:
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise StorageError(f"cannot write stats to {path}: {e}", stage="analyze") from e
    return Path(path)


def read_stats(path: Path) -> PartStatsReport:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise StorageError(f"cannot read stats from {path}: {e}", stage="analyze") from e
    if doc.get("format_version") != STATS_VERSION:
        raise StorageError(f"{path}: unsupported stats version {doc.get('format_version')}", stage="analyze")
    diag = doc.get("diagnostics", {})
    return PartStatsReport(
        scenario=doc["scenario"],
        parts=[PartStats(**p) for p in doc["parts"]],
        grand_total=doc["grand_total"],
        images_processed=doc["images_processed"],
        images_trimmed=doc["images_trimmed"],
        unowned_colors=diag.get("unowned_colors", 0),
        unowned_observations=diag.get("unowned_observations", 0),
        provenance=doc.get("provenance", {}),
    )
