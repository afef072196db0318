import numpy as np
import pytest

from conftest import facing_quad, write_obj, write_scenario
from src.core.errors import ConsistencyError, EmptyDataError, PlasmaRangeError, StorageError, StrictColorError
from src.stages.analyze import (
    ExposureCounts,
    aggregate,
    analyze_capture,
    count_image,
    emit_heatmap,
    load_lut,
    part_stats,
    plasma,
    plasma_colors,
    read_stats,
    write_stats,
)
from src.stages.capture import capture_scenario
from src.stages.meshkit import PartIdentificationTexture, TexelCensus, bake_pidt, census
from src.stages.palette import DEFAULT_IGNORE_COLOR, SIZE, pack_image, unpack_image
from src.stages.scene import load_scenario


def _lut_color(i):
    r, g, b = (int(np.floor(c + 0.5)) for c in load_lut()[i])
    return (r << 16) | (g << 8) | b


def _toy_pidt():
    part = np.full((SIZE, SIZE), -1, dtype=np.int16)
    part[0, 0:4] = 0
    part[0, 10:12] = 1
    return PartIdentificationTexture(part=part, parts=["b", "a", "c"])


def _toy_counts():
    counts = ExposureCounts(images_processed=40, images_trimmed=30)
    for color, n in {0: 5, 1: 3, 10: 2, 11: 4, 500: 7}.items():
        counts.counts[color] = n
    return counts


def _capture(tmp_path, scenario_path, quad_obj):
    bake_pidt(quad_obj, None, tmp_path / "pidt")
    sc = load_scenario(scenario_path).with_scale(10)
    capture_scenario(sc, tmp_path / "captures", progress=False)
    return tmp_path / "captures", tmp_path / "pidt"


def test_count_image_counts_each_color_once():
    image = np.full((4, 4), DEFAULT_IGNORE_COLOR, dtype=np.uint32)
    image[0, :] = 7
    image[1, 1] = 9
    counts = count_image(image, DEFAULT_IGNORE_COLOR, ExposureCounts())
    count_image(image, DEFAULT_IGNORE_COLOR, counts)
    assert counts.counts[7] == 2
    assert counts.counts[9] == 2
    assert counts.counts[DEFAULT_IGNORE_COLOR] == 0
    assert int(counts.counts.sum()) == 4


def test_count_image_flags_unowned_colors():
    owned = np.zeros(SIZE * SIZE, dtype=bool)
    owned[7] = True
    image = np.array([[7, 9]], dtype=np.uint32)
    counts = count_image(image, DEFAULT_IGNORE_COLOR, ExposureCounts(), owned)
    assert counts.unowned_images == 1


def test_part_stats():
    pidt = _toy_pidt()
    report = part_stats(_toy_counts(), pidt, census(pidt), scenario="T")
    assert [p.name for p in report.parts] == ["a", "b", "c"]
    a, b, c = report.parts
    assert (b.texels, b.total, b.peak, b.average) == (4, 8, 5, 2.0)
    assert (a.texels, a.total, a.peak, a.average) == (2, 6, 4, 3.0)
    assert (c.texels, c.total, c.peak, c.average, c.portion) == (0, 0, 0, 0.0, 0.0)
    assert report.grand_total == 14
    assert b.portion == pytest.approx(8 / 14)
    assert sum(p.portion for p in report.parts) == pytest.approx(1.0)
    assert (report.unowned_colors, report.unowned_observations) == (1, 7)
    assert (report.images_processed, report.images_trimmed) == (40, 30)


def test_part_stats_rejects_stale_census():
    pidt = _toy_pidt()
    stale = TexelCensus(counts={"b": 4, "a": 3, "c": 0}, total=7)
    with pytest.raises(ConsistencyError):
        part_stats(_toy_counts(), pidt, stale)


def test_stats_round_trip(tmp_path):
    pidt = _toy_pidt()
    report = part_stats(_toy_counts(), pidt, census(pidt), scenario="T", provenance={"rate": 60})
    path = write_stats(report, tmp_path / "stats.json")
    assert read_stats(path) == report


def test_counts_save_load(tmp_path):
    counts = _toy_counts()
    counts.tiles_decoded = 10
    back = ExposureCounts.load(counts.save(tmp_path / "counts.npz"))
    assert np.array_equal(back.counts, counts.counts)
    assert (back.images_processed, back.images_trimmed, back.tiles_decoded) == (40, 30, 10)


def test_plasma_endpoints_and_midpoint():
    lut = load_lut()
    assert plasma(0.0) == _lut_color(0)
    assert plasma(1.0) == _lut_color(255)
    mid = np.floor((lut[127] + lut[128]) / 2 + 0.5).astype(int)
    assert plasma(0.5) == (mid[0] << 16) | (mid[1] << 8) | mid[2]
    assert plasma_colors(np.array([0.0, 1.0])).tolist() == [plasma(0.0), plasma(1.0)]


@pytest.mark.parametrize("u", [-0.01, 1.2, float("nan")])
def test_plasma_range(u):
    with pytest.raises(PlasmaRangeError):
        plasma(u)


def test_heatmap_single_texel():
    counts = ExposureCounts()
    counts.counts[5 * SIZE + 3] = 5
    heat = emit_heatmap(counts)
    packed = pack_image(heat.image)
    assert heat.max_value == 5
    assert packed[5, 3] == plasma(1.0)
    assert packed[0, 0] == plasma(0.0)
    assert np.count_nonzero(packed == plasma(0.0)) == SIZE * SIZE - 1


def test_heatmap_of_nothing():
    with pytest.raises(EmptyDataError):
        emit_heatmap(ExposureCounts())


def test_analyze_quad_capture(tmp_path, quad_scenario, quad_obj):
    captures, pidt = _capture(tmp_path, quad_scenario, quad_obj)
    report, counts = analyze_capture(captures, pidt, tmp_path / "analysis", progress=False)
    quad = report.by_name()["Windshield"]
    assert (quad.texels, quad.total, quad.peak, quad.average) == (256, 256 * 22, 22, 22.0)
    assert report.images_processed == 550
    assert report.images_trimmed == 528
    assert report.unowned_colors == 0
    assert counts.tiles_decoded == 22
    for name in ("stats.json", "counts.npz", "heatmap.png"):
        assert (tmp_path / "analysis" / name).is_file()


def test_walled_capture_has_nothing_to_map(tmp_path, walled_scenario, quad_obj):
    captures, pidt = _capture(tmp_path, walled_scenario, quad_obj)
    with pytest.raises(EmptyDataError):
        analyze_capture(captures, pidt, tmp_path / "analysis", progress=False)


def test_strict_colors_rejects_foreign_pixels(tmp_path, quad_scenario, quad_obj):
    captures, pidt = _capture(tmp_path, quad_scenario, quad_obj)
    # re-bake the PIdT for a smaller island so part of the captured quad is unowned
    bake_pidt(write_obj(tmp_path / "small.obj", [facing_quad(rect=(64, 64, 8, 16))]), None, pidt)
    with pytest.raises(StrictColorError):
        analyze_capture(captures, pidt, tmp_path / "analysis", strict_colors=True, progress=False)


@pytest.mark.slow
def test_trim_and_workers_do_not_change_results(tmp_path, quad_scenario, quad_obj):
    captures, pidt = _capture(tmp_path, quad_scenario, quad_obj)
    outs = {}
    for label, kwargs in {"base": {}, "no_trim": {"no_trim": True}, "workers": {"workers": 2}}.items():
        analyze_capture(captures, pidt, tmp_path / label, progress=False, **kwargs)
        outs[label] = tuple((tmp_path / label / n).read_bytes() for n in ("stats.json", "heatmap.png"))
    assert outs["base"] == outs["no_trim"] == outs["workers"]


def test_undecodable_tile_is_storage_error(tmp_path, quad_scenario):
    manifest = capture_scenario(load_scenario(quad_scenario).with_scale(10), tmp_path / "captures", progress=False)
    kept = max(manifest.records, key=lambda r: r.bytes)
    (manifest.root / kept.path).write_bytes(bytes(kept.bytes))
    with pytest.raises(StorageError) as info:
        aggregate(manifest, progress=False)
    assert info.value.stage == "analyze"
    assert kept.path in str(info.value)


@pytest.mark.slow
def test_full_schedule_counts_every_texel_in_every_image(tmp_path, quad_obj):
    path = write_scenario(tmp_path / "full.yaml", quad_obj, rate=60.0, duration=3.0)
    captures, pidt = _capture(tmp_path, path, quad_obj)
    report, counts = analyze_capture(captures, pidt, tmp_path / "analysis", progress=False)
    quad = report.by_name()["Windshield"]
    owned = counts.counts.reshape(SIZE, SIZE)[64:80, 64:80]
    assert np.all(owned == 362)
    assert quad.peak == 362
    assert quad.average == pytest.approx(quad.total / quad.texels, abs=1e-9)
    assert report.images_processed == 9050


def test_heatmap_inverts_to_within_one_step():
    counts = ExposureCounts()
    counts.counts[:256] = np.arange(256)
    heat = emit_heatmap(counts)
    assert heat.max_value == 255
    packed = pack_image(heat.image).ravel()[:256]
    got = unpack_image(packed).astype(np.int64)
    lut = unpack_image(np.array([_lut_color(i) for i in range(256)])).astype(np.int64)
    dist = ((got[:, None, :] - lut[None, :, :]) ** 2).sum(axis=-1)
    recovered = dist.argmin(axis=1) / 255.0
    assert np.all(np.abs(recovered - np.arange(256) / 255.0) <= 1 / 255 + 1e-12)
    assert packed[255] == _lut_color(255)
