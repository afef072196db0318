import io

from rich.console import Console

from src.report import report_top5, run_report, to_markdown, top5_union
from src.stages.analyze import PartStats, PartStatsReport, write_stats


def _part(name, texels, total, peak):
    return PartStats(name=name, texels=texels, total=total, peak=peak,
                     average=total / texels, portion=0.0)


def _report(parts):
    return PartStatsReport(scenario="T", parts=parts, grand_total=sum(p.total for p in parts),
                           images_processed=10, images_trimmed=5)


def _mixed():
    return _report([
        _part("p1", 100, 1000, 10),
        _part("p2", 100, 900, 9),
        _part("p3", 100, 800, 9),
        _part("p4", 100, 700, 9),
        _part("p5", 100, 600, 9),
        _part("p6", 1, 50, 50),
        _part("p7", 100, 10, 100),
        _part("p8", 100, 5, 1),
    ])


def test_union_over_total_average_and_peak():
    names = [p.name for p in top5_union(_mixed())]
    assert names == ["p1", "p2", "p3", "p4", "p5", "p6", "p7"]


def test_ties_break_by_name():
    report = _report([_part("b", 10, 100, 5), _part("a", 10, 100, 5), _part("c", 10, 50, 5)])
    assert [p.name for p in top5_union(report)] == ["a", "b", "c"]


def test_markdown_table():
    text = to_markdown(_mixed())
    assert "| Part | Total | Peak | Average | Portion |" in text
    assert "| p1 | 1000 | 10 | 10.000 |" in text
    assert "p8" not in text


def test_rich_table_lists_the_union():
    text = report_top5(_mixed())
    assert "p7" in text
    assert "p8" not in text


def test_run_report_reads_stats_documents(tmp_path):
    stats = write_stats(_mixed(), tmp_path / "stats.json")
    console = Console(file=io.StringIO(), width=120, color_system=None)
    run_report([stats, stats], markdown=True, console=console)
    text = console.file.getvalue()
    assert text.count("### Scenario T") == 2
    assert "| p7 | 10 | 100 |" in text
