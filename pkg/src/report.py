"""Top-5 part tables from one or more stats documents.

Usage (from repo root):
    python -m src.report out/analysis/stats.json [more stats.json ...] [--markdown]
"""

from __future__ import annotations

import argparse
import io
from pathlib import Path
from typing import Iterable, List, Optional

from rich.console import Console
from rich.table import Table

from .stages.analyze import PartStats, PartStatsReport, read_stats

TOP_N = 5


def _top(parts: Iterable[PartStats], key: str, n: int = TOP_N) -> List[PartStats]:
    # ties broken by part name ascending
    return sorted(parts, key=lambda p: (-getattr(p, key), p.name))[:n]


def top5_union(report: PartStatsReport, n: int = TOP_N) -> List[PartStats]:
    """Parts among the n highest by total, average or peak; ordered by total, then name."""
    chosen = {p.name: p for key in ("total", "average", "peak") for p in _top(report.parts, key, n)}
    return sorted(chosen.values(), key=lambda p: (-p.total, p.name))


def _title(report: PartStatsReport) -> str:
    return f"Scenario {report.scenario}: grand total {report.grand_total:,}"


def to_table(report: PartStatsReport) -> Table:
    table = Table(title=_title(report))
    table.add_column("Part")
    for col in ("Total", "Peak", "Average", "Portion"):
        table.add_column(col, justify="right")
    for p in top5_union(report):
        table.add_row(p.name, f"{p.total:,}", f"{p.peak:,}", f"{p.average:.3f}", f"{p.portion:.2%}")
    return table


def to_markdown(report: PartStatsReport) -> str:
    lines = [
        f"### {_title(report)}",
        "",
        "| Part | Total | Peak | Average | Portion |",
        "|---|---:|---:|---:|---:|",
    ]
    lines += [
        f"| {p.name} | {p.total} | {p.peak} | {p.average:.3f} | {p.portion:.2%} |"
        for p in top5_union(report)
    ]
    return "\n".join(lines) + "\n"


def report_top5(report: PartStatsReport, markdown: bool = False) -> str:
    if markdown:
        return to_markdown(report)
    console = Console(file=io.StringIO(), width=100, color_system=None)
    console.print(to_table(report))
    return console.file.getvalue()


def add_arguments(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
    p.add_argument("stats", type=Path, nargs="+", help="stats.json documents written by `analyze`.")
    p.add_argument("--markdown", action="store_true", help="Emit Markdown tables instead of rich tables.")
    return p


def run_report(paths: List[Path], markdown: bool = False, console: Optional[Console] = None) -> None:
    console = console or Console()
    for path in paths:
        report = read_stats(path)
        if markdown:
            console.print(to_markdown(report), markup=False, highlight=False)
        else:
            console.print(to_table(report))


def main(argv: Optional[List[str]] = None) -> None:
    args = add_arguments(argparse.ArgumentParser(description="Top-5 exposed parts per scenario.")).parse_args(argv)
    run_report(args.stats, markdown=args.markdown)


if __name__ == "__main__":  # pragma: no cover
    main()
