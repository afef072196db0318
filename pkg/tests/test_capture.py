import json
import logging

import numpy as np
import pytest

from src.stages.capture import (
    SAMPLE_COLORS,
    CaptureRecord,
    Manifest,
    TrimThreshold,
    capture_scenario,
    compute_threshold,
    decode_tile,
    encode_tile,
    is_empty,
    tile_name,
)
from src.stages.palette import DEFAULT_IGNORE_COLOR
from src.stages.scene import load_scenario

TILE = (128, 162)


def _record(n_bytes, keep=False):
    return CaptureRecord(path="x.png", scenario="T", frame=0, eye="L", row=0, col=0, bytes=n_bytes, keep=keep)


def _solid(color=DEFAULT_IGNORE_COLOR):
    return np.full((TILE[1], TILE[0]), color, dtype=np.uint32)


def test_encode_is_lossless():
    rng = np.random.default_rng(7)
    pixels = rng.integers(0, 1 << 24, size=(TILE[1], TILE[0]), dtype=np.uint32)
    assert np.array_equal(decode_tile(encode_tile(pixels)), pixels)


def test_encode_is_deterministic():
    pixels = _solid()
    pixels[10, 10] = 0x000123
    assert encode_tile(pixels) == encode_tile(pixels.copy())


def test_threshold_is_solid_ignore_length():
    thr = compute_threshold(TILE, DEFAULT_IGNORE_COLOR)
    assert thr.length == len(encode_tile(_solid()))
    assert (thr.width, thr.height) == TILE
    assert is_empty(_record(len(encode_tile(_solid()))), thr)


def test_one_subject_pixel_is_not_empty():
    thr = compute_threshold(TILE, DEFAULT_IGNORE_COLOR)
    pixels = _solid()
    pixels[81, 64] = 0x0A0B0C
    assert not is_empty(_record(len(encode_tile(pixels))), thr)


def test_keep_flag_is_never_trimmed():
    thr = compute_threshold(TILE, DEFAULT_IGNORE_COLOR)
    assert not is_empty(_record(thr.length, keep=True), thr)


def test_solid_length_mismatch_is_recorded(tmp_path, caplog, quad_scenario):
    lengths = {len(encode_tile(_solid(c))) for c in (DEFAULT_IGNORE_COLOR, *SAMPLE_COLORS)}
    compute_threshold.cache_clear()
    with caplog.at_level(logging.WARNING):
        thr = compute_threshold(TILE, DEFAULT_IGNORE_COLOR)
    assert thr.solid_lengths_uniform == (len(lengths) == 1)
    assert ("encode to different lengths" in caplog.text) == (len(lengths) > 1)
    capture_scenario(load_scenario(quad_scenario).with_scale(10), tmp_path, progress=False)
    raw = json.loads((tmp_path / "manifest.json").read_text())
    assert raw["threshold"]["solid_lengths_uniform"] == thr.solid_lengths_uniform


def test_short_file_is_skipped_with_warning(caplog):
    thr = TrimThreshold(length=300, width=128, height=162, ignore_color=DEFAULT_IGNORE_COLOR)
    with caplog.at_level(logging.WARNING):
        assert is_empty(_record(120), thr)
    assert "shorter than a solid tile" in caplog.text


def test_tile_name():
    assert tile_name("A", 7, "R", 2, 3) == "SA_f0007_R_r2c3.png"


def test_capture_quad_scenario(tmp_path, quad_scenario):
    sc = load_scenario(quad_scenario).with_scale(10)
    out = tmp_path / "captures"
    out.mkdir()
    (out / "ST_f9999_L_r0c0.png").write_bytes(b"stale")
    manifest = capture_scenario(sc, out, progress=False)

    assert len(manifest.records) == 11 * 2 * 25
    assert not (out / "ST_f9999_L_r0c0.png").exists()
    assert [r.path for r in manifest.records] == sorted(r.path for r in manifest.records)
    for r in manifest.records:
        assert (out / r.path).stat().st_size == r.bytes

    kept = [r for r in manifest.records if not is_empty(r, manifest.threshold)]
    assert {(r.row, r.col) for r in kept} == {(2, 2)}
    assert len(kept) == 22
    assert manifest.schedule["frames"] == 11


def test_manifest_round_trip(tmp_path, quad_scenario):
    sc = load_scenario(quad_scenario).with_scale(10)
    manifest = capture_scenario(sc, tmp_path, progress=False)
    back = Manifest.read(tmp_path)
    assert back.to_json() == manifest.to_json()
    raw = json.loads((tmp_path / "manifest.json").read_text())
    assert raw["ignore_color"] == "#000FFF"
