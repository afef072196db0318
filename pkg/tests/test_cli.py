import json

import pytest

from conftest import facing_quad, write_obj
from src.cli import EXIT_OK, EXIT_STAGE, EXIT_STRICT, EXIT_USAGE, main
from src.stages.capture import capture_scenario
from src.stages.meshkit import bake_pidt
from src.stages.scene import load_scenario


def test_unknown_option_is_a_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["run", "--no-such-flag"])
    assert e.value.code == EXIT_USAGE


def test_invalid_scale(tmp_path, quad_scenario):
    assert main(["--quiet", "run", "--scenario", str(quad_scenario), "--out", str(tmp_path), "--scale", "0"]) == EXIT_USAGE


def test_missing_scenario(tmp_path):
    assert main(["--quiet", "render", "--scenario", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == EXIT_STAGE


def test_bake_pidt_of_missing_mesh(tmp_path):
    assert main(["--quiet", "bake-pidt", "--mesh", str(tmp_path / "nope.obj"), "--out", str(tmp_path)]) == EXIT_STAGE


def test_bake_pidt(tmp_path, quad_obj):
    assert main(["--quiet", "bake-pidt", "--mesh", str(quad_obj), "--out", str(tmp_path / "pidt")]) == EXIT_OK
    sidecar = json.loads((tmp_path / "pidt" / "parts.json").read_text())
    assert sidecar["total_texels"] == 256


def test_bake_pidt_with_bundled_vehicle_parts(tmp_path):
    faces = [facing_quad("hood", rect=(0, 0, 8, 8)), facing_quad("roof", rect=(16, 0, 8, 8))]
    mesh = write_obj(tmp_path / "car.obj", faces)
    argv = ["--quiet", "bake-pidt", "--mesh", str(mesh), "--parts", "vehicle", "--out", str(tmp_path / "pidt")]
    assert main(argv) == EXIT_OK
    sidecar = json.loads((tmp_path / "pidt" / "parts.json").read_text())
    texels = {p["name"]: p["texels"] for p in sidecar["parts"]}
    assert len(texels) == 68
    assert texels["Hood"] == texels["Roof"] == 64
    assert texels["Windshield"] == 0


def test_strict_colors_exit_code(tmp_path, quad_scenario):
    capture_scenario(load_scenario(quad_scenario).with_scale(10), tmp_path / "captures", progress=False)
    small = write_obj(tmp_path / "small.obj", [facing_quad(rect=(64, 64, 8, 16))])
    bake_pidt(small, None, tmp_path / "pidt")
    argv = ["--quiet", "analyze", "--captures", str(tmp_path / "captures"), "--pidt", str(tmp_path / "pidt"),
            "--out", str(tmp_path / "analysis")]
    assert main(argv + ["--strict-colors"]) == EXIT_STRICT
    assert main(argv) == EXIT_OK
    stats = json.loads((tmp_path / "analysis" / "stats.json").read_text())
    assert stats["diagnostics"]["unowned_colors"] > 0


@pytest.mark.slow
def test_run_end_to_end(tmp_path, quad_scenario):
    out = tmp_path / "out"
    argv = ["--quiet", "run", "--scenario", str(quad_scenario), "--out", str(out), "--scale", "10"]
    assert main(argv) == EXIT_OK
    for rel in ("palette/fcsp.png", "pidt/pidt.png", "pidt/parts.json", "captures/manifest.json",
                "analysis/stats.json", "analysis/heatmap.png"):
        assert (out / rel).is_file()

    stats = json.loads((out / "analysis" / "stats.json").read_text())
    assert stats["grand_total"] == 256 * 22
    assert stats["images_processed"] == 550
    assert stats["images_trimmed"] >= 275

    assert main(argv) == EXIT_OK
    rows = [json.loads(line) for line in (out / "run_log.jsonl").read_text().splitlines()]
    assert len(rows) == 8
    assert all(r["cached"] for r in rows[4:])
    assert rows[-1]["grand_total"] == 256 * 22


@pytest.mark.slow
def test_workers_and_trim_do_not_change_outputs(tmp_path, quad_scenario):
    base = ["--quiet", "run", "--scenario", str(quad_scenario), "--scale", "10"]
    assert main(base + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(base + ["--out", str(tmp_path / "b"), "--workers", "2", "--no-trim"]) == EXIT_OK
    for name in ("stats.json", "heatmap.png"):
        assert (tmp_path / "a" / "analysis" / name).read_bytes() == (tmp_path / "b" / "analysis" / name).read_bytes()
