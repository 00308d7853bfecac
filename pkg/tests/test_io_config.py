"""File formats: bitwise round trips, strict parsing, heatmap bytes, and
config handling."""

import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from radonsource import (
    FieldTensor,
    ParseError,
    Provenance,
    RealGrid,
    SamplingGrid,
    SensorArray,
    UsageError,
    WavenumberGrid,
    parse_config,
    read_field_tensor,
    read_grid,
    write_field_tensor,
    write_grid,
    write_heatmap,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def _tensor(L=3, M=4, seed=0, noisy=False):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=(L, M)) + 1j * rng.normal(size=(L, M))
    prov = Provenance("noisy", 0.2, 42) if noisy else Provenance("clean")
    return FieldTensor(SensorArray(5.0, L), WavenumberGrid(0.1, 0.1, M), vals, prov)


# ---------------------------------------------------------------------------
# field tensor round trips
# ---------------------------------------------------------------------------
def test_tensor_round_trip_bitwise(tmp_path):
    t = _tensor(noisy=True)
    path = str(tmp_path / "field.csv")
    write_field_tensor(t, path)
    back = read_field_tensor(path)
    assert np.array_equal(back.values, t.values)
    assert back.sensors == t.sensors
    assert back.wavenumbers == t.wavenumbers
    assert back.provenance == t.provenance


def test_tensor_row_count(tmp_path):
    t = _tensor(L=30, M=300)
    path = str(tmp_path / "field.csv")
    write_field_tensor(t, path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 1 + 30 * 300
    assert lines[0] == "l,m,sensor_x,sensor_y,k,re,im"


def test_tensor_missing_sidecar(tmp_path):
    t = _tensor()
    path = str(tmp_path / "field.csv")
    write_field_tensor(t, path)
    os.unlink(path + ".meta.json")
    with pytest.raises(ParseError, match="sidecar"):
        read_field_tensor(path)


def test_tensor_malformed_row_reports_line(tmp_path):
    t = _tensor()
    path = str(tmp_path / "field.csv")
    write_field_tensor(t, path)
    lines = open(path).read().splitlines()
    lines[3] = "0,2,bad,0.0,0.3,1.0"
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match=":4"):
        read_field_tensor(path)


def test_tensor_non_finite_rejected(tmp_path):
    t = _tensor()
    path = str(tmp_path / "field.csv")
    write_field_tensor(t, path)
    lines = open(path).read().splitlines()
    parts = lines[1].split(",")
    parts[5] = "inf"
    lines[1] = ",".join(parts)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match="finite"):
        read_field_tensor(path)


def test_tensor_truncated_rejected(tmp_path):
    t = _tensor()
    path = str(tmp_path / "field.csv")
    write_field_tensor(t, path)
    lines = open(path).read().splitlines()
    with open(path, "w") as fh:
        fh.write("\n".join(lines[:-2]) + "\n")
    with pytest.raises(ParseError, match="data rows"):
        read_field_tensor(path)


@settings(max_examples=25, deadline=None)
@given(
    hnp.arrays(np.float64, (2, 3), elements=finite),
    hnp.arrays(np.float64, (2, 3), elements=finite),
)
def test_tensor_round_trip_property(tmp_path_factory, re_part, im_part):
    t = FieldTensor(
        SensorArray(5.0, 2),
        WavenumberGrid(0.1, 0.1, 3),
        re_part + 1j * im_part,
        Provenance("clean"),
    )
    path = str(tmp_path_factory.mktemp("rt") / "f.csv")
    write_field_tensor(t, path)
    assert np.array_equal(read_field_tensor(path).values, t.values)


# ---------------------------------------------------------------------------
# grid round trips
# ---------------------------------------------------------------------------
def test_grid_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(5)
    g = RealGrid(SamplingGrid(-3, 3, -2, 2, 7, 5), rng.normal(size=(5, 7)))
    path = str(tmp_path / "grid.csv")
    write_grid(g, path)
    back = read_grid(path)
    assert back.grid == g.grid
    assert np.array_equal(back.values, g.values)


def test_grid_row_count_matches_dims(tmp_path):
    g = RealGrid(SamplingGrid(-1, 1, -1, 1, 11, 13), np.zeros((13, 11)))
    path = str(tmp_path / "grid.csv")
    write_grid(g, path)
    with open(path) as fh:
        rows = fh.read().splitlines()
    assert len(rows) == 1 + 11 * 13


def test_grid_node_coords_verified(tmp_path):
    g = RealGrid(SamplingGrid(-3, 3, -3, 3, 4, 4), np.zeros((4, 4)))
    path = str(tmp_path / "grid.csv")
    write_grid(g, path)
    lines = open(path).read().splitlines()
    parts = lines[1].split(",")
    parts[2] = repr(float(parts[2]) + 1e-9)
    lines[1] = ",".join(parts)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match="coordinates"):
        read_grid(path)


@settings(max_examples=25, deadline=None)
@given(hnp.arrays(np.float64, (3, 4), elements=finite))
def test_grid_round_trip_property(tmp_path_factory, vals):
    g = RealGrid(SamplingGrid(0.0, 1.0, 0.0, 1.0, 4, 3), vals)
    path = str(tmp_path_factory.mktemp("rt") / "g.csv")
    write_grid(g, path)
    assert np.array_equal(read_grid(path).values, g.values)


def test_no_temp_files_left(tmp_path):
    g = RealGrid(SamplingGrid(0, 1, 0, 1, 3, 3), np.zeros((3, 3)))
    write_grid(g, str(tmp_path / "a.csv"))
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
    assert leftovers == []


# ---------------------------------------------------------------------------
# heatmaps
# ---------------------------------------------------------------------------
def _read_ppm(path):
    data = open(path, "rb").read()
    magic, dims, maxval, pixels = data.split(b"\n", 3)
    w, h = (int(v) for v in dims.split())
    assert magic == b"P6" and maxval == b"255"
    return w, h, np.frombuffer(pixels, dtype=np.uint8).reshape(h, w, 3)


def test_heatmap_zero_grid_is_white(tmp_path):
    g = RealGrid(SamplingGrid(0, 1, 0, 1, 4, 3), np.zeros((3, 4)))
    path = str(tmp_path / "z.ppm")
    write_heatmap(g, path)
    w, h, px = _read_ppm(path)
    assert (w, h) == (4, 3)
    assert np.all(px == 255)


def test_heatmap_endpoint_colors(tmp_path):
    vals = np.array([[-1.0, 0.0, 1.0]])
    g = RealGrid(SamplingGrid(0, 1, 0, 1, 3, 2), np.vstack([vals, vals]))
    path = str(tmp_path / "e.ppm")
    write_heatmap(g, path, vrange=(-1.0, 1.0))
    _, _, px = _read_ppm(path)
    assert tuple(px[0, 0]) == (0, 0, 255)      # lo -> saturated blue
    assert tuple(px[0, 1]) == (255, 255, 255)  # midpoint -> white
    assert tuple(px[0, 2]) == (255, 0, 0)      # hi -> saturated red


def test_heatmap_pixel_count(tmp_path):
    g = RealGrid(SamplingGrid(0, 1, 0, 1, 7, 5), np.random.default_rng(1).normal(size=(5, 7)))
    path = str(tmp_path / "c.ppm")
    write_heatmap(g, path)
    w, h, px = _read_ppm(path)
    assert w * h == 35


def test_heatmap_bad_range(tmp_path):
    g = RealGrid(SamplingGrid(0, 1, 0, 1, 3, 3), np.zeros((3, 3)))
    with pytest.raises(UsageError):
        write_heatmap(g, str(tmp_path / "x.ppm"), vrange=(1.0, 1.0))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------
def test_defaults_match_reference_settings():
    cfg = parse_config()
    assert (cfg.L, cfg.k_min, cfg.k_max, cfg.dk) == (30, 0.1, 30.0, 0.1)
    assert cfg.delta == 0.2
    assert (cfg.nx, cfg.ny) == (601, 601)
    assert cfg.grid_bounds == (-3.0, 3.0, -3.0, 3.0)
    assert cfg.R == 5.0
    assert cfg.kgrid().count == 300


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# experiment\nL = 60\ndk = 0.05\nexample = 1\n")
    cfg = parse_config(str(path), {"L": 120, "delta": 0.0})
    assert cfg.L == 120  # CLI wins
    assert cfg.dk == 0.05
    assert cfg.delta == 0.0
    assert cfg.example == 1


def test_config_unknown_key(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("wavelength = 3\n")
    with pytest.raises(UsageError, match="wavelength"):
        parse_config(str(path))


def test_config_rejects_zero_dk():
    with pytest.raises(UsageError, match="dk"):
        parse_config(None, {"dk": 0.0})


def test_config_grid_spec():
    cfg = parse_config(None, {"grid": "-2,2,-1,1,101,51"})
    assert cfg.grid_bounds == (-2.0, 2.0, -1.0, 1.0)
    assert (cfg.nx, cfg.ny) == (101, 51)
    with pytest.raises(UsageError, match="grid"):
        parse_config(None, {"grid": "-2,2,-1,1,101"})


def test_config_dk_must_fit_band():
    with pytest.raises(UsageError, match="divide"):
        parse_config(None, {"kmin": 0.1, "kmax": 30.0, "dk": 0.07})


def test_config_source_file_switches_mode(tmp_path):
    g = RealGrid(SamplingGrid(-1, 1, -1, 1, 5, 5), np.ones((5, 5)))
    mask_path = str(tmp_path / "mask.csv")
    write_grid(g, mask_path)
    cfg = parse_config(None, {"source-file": mask_path})
    assert cfg.example is None
    model = cfg.source_model()
    assert model.values.shape == (5, 5)


def test_error_stats_json(tmp_path):
    from radonsource import error_stats, write_error_stats

    g1 = RealGrid(SamplingGrid(0, 1, 0, 1, 3, 3), np.ones((3, 3)))
    g2 = RealGrid(SamplingGrid(0, 1, 0, 1, 3, 3), np.zeros((3, 3)))
    stats = error_stats(g1, g2)
    path = str(tmp_path / "stats.json")
    write_error_stats(stats, path)
    data = json.loads(open(path).read())
    assert data["l_inf"] == 1.0
    assert data["reference_l2_degenerate"] is True
    assert math.isfinite(data["l2_relative"])
