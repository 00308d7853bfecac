"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with the measured figures.

Criterion 5 (strict monotone convergence of the percentile-95 error along
the (L, k_max) schedule for the smooth builtin source) is implemented
exactly as stated and is expected to fail: the source's Gaussian spectrum
is numerically exhausted near k ~ 12, so enlarging k_max adds only the
support-truncation edge signal, which slightly increases the error.  See
the decisions ledger for the measured analysis.
"""

import csv
import pathlib
import time

import numpy as np
import pytest

from radonsource import (
    AnalyticPeaks,
    Disk,
    FieldTensor,
    NoiseSpec,
    Provenance,
    QuadratureSpec,
    SamplingGrid,
    SensorArray,
    ShapeSum,
    WavenumberGrid,
    add_noise,
    builtin_example,
    build_quadrature,
    check_disk_identity,
    disk_field_closed_form,
    error_stats,
    eval_source_many,
    indicator_grid,
    rasterize,
    read_field_tensor,
    read_grid,
    scattered_field,
    synthesize,
    write_field_tensor,
    write_grid,
)
from radonsource.specfun import j0_values, j1_values, y0_values, y1_values

ORACLE_CSV = pathlib.Path(__file__).parent / "data" / "specfun_oracle.csv"
UNIT_DISK = ShapeSum(((Disk((0.0, 0.0), 1.0), 1.0),))


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="module", autouse=True)
def _warm_kernels():
    # Compile/load every jitted kernel before any timed section.
    x = np.linspace(0.5, 20.0, 64)
    j0_values(x), j1_values(x), y0_values(x), y1_values(x)
    sensors = SensorArray(5.0, 4)
    kgrid = WavenumberGrid(0.5, 0.5, 3)
    t = synthesize(UNIT_DISK, sensors, kgrid, QuadratureSpec(n_q=32))
    indicator_grid(t, SamplingGrid(-1, 1, -1, 1, 3, 3))


# ---------------------------------------------------------------------------
# 1. Special-function contract
# ---------------------------------------------------------------------------
def test_criterion_1_specfun_contract():
    t0 = time.perf_counter()
    with ORACLE_CSV.open() as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    assert x.size == 2000
    worst = 0.0
    for name, fn in (("j0", j0_values), ("j1", j1_values), ("y0", y0_values), ("y1", y1_values)):
        ref = np.array([float(r[name]) for r in rows])
        rel = np.abs(fn(x) - ref) / np.abs(ref)
        worst = max(worst, float(np.max(rel)))
    wron = j1_values(x) * y0_values(x) - j0_values(x) * y1_values(x)
    target = 2.0 / (np.pi * x)
    wron_rel = float(np.max(np.abs(wron - target) / target))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and wron_rel <= 1e-10 and elapsed < 1.0
    _report(1, "special-function contract", ok,
            f"worst rel {worst:.2e}, wronskian {wron_rel:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-10
    assert wron_rel <= 1e-10
    assert elapsed < 1.0


# ---------------------------------------------------------------------------
# 2. Forward oracle
# ---------------------------------------------------------------------------
def test_criterion_2_forward_oracle():
    from tests._oracles import adaptive_disk_field

    t0 = time.perf_counter()
    spec = QuadratureSpec(n_q=512, rule="refined")
    quad = build_quadrature(UNIT_DISK, spec)
    worst = 0.0
    for k in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0):
        exact = disk_field_closed_form(k, 1.0, 1.0, 5.0)
        got = scattered_field(UNIT_DISK, (5.0, 0.0), k, spec, quad=quad)
        worst = max(worst, abs(got - exact) / abs(exact))
    worst_ind = 0.0
    for k in (0.5, 5.0, 20.0):
        exact = disk_field_closed_form(k, 1.0, 1.0, 5.0)
        ref = adaptive_disk_field(k, 1.0, 1.0, 5.0)
        worst_ind = max(worst_ind, abs(ref - exact) / abs(exact))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and worst_ind <= 1e-8 and elapsed < 10.0
    _report(2, "forward disk oracle", ok,
            f"solver vs closed form {worst:.2e}, adaptive oracle vs closed form "
            f"{worst_ind:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-6
    assert worst_ind <= 1e-8
    assert elapsed < 10.0


# ---------------------------------------------------------------------------
# 3. Boundary-integral identity
# ---------------------------------------------------------------------------
def test_criterion_3_boundary_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    pairs = []
    while len(pairs) < 20:
        z, y = rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2)
        if np.hypot(*z) < 3.0 and np.hypot(*y) < 3.0:
            pairs.append((tuple(z), tuple(y)))
    worst = 0.0
    worst_coarse = 0.0
    for k in (1.0, 5.0, 10.0):
        worst = max(worst, max(check_disk_identity(k, z, y, 5.0, 512) for z, y in pairs))
    worst_coarse = max(check_disk_identity(10.0, z, y, 5.0, 32) for z, y in pairs)
    fine_at_10 = max(check_disk_identity(10.0, z, y, 5.0, 512) for z, y in pairs)
    decay = worst_coarse / max(fine_at_10, 1e-300)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and decay >= 1e3 and elapsed < 5.0
    _report(3, "boundary-integral identity", ok,
            f"worst residual {worst:.2e}, decay 32->512 {decay:.1e}x, {elapsed:.1f} s")
    assert worst <= 1e-8
    assert decay >= 1e3
    assert elapsed < 5.0


# ---------------------------------------------------------------------------
# 4. Smooth-source reconstruction at scale (and noise robustness)
# ---------------------------------------------------------------------------
@pytest.fixture(scope="module")
def smooth_run():
    """Shared synthesis + reconstructions for criteria 4 and the noise
    degradation property.  n_q = 256 keeps the raster bias (~1e-4 on the
    indicator) two orders below the acceptance tolerance at half the cost
    of the synthesis default."""
    model = AnalyticPeaks()
    sensors = SensorArray(5.0, 60)
    kgrid = WavenumberGrid(0.1, 0.1, 300)
    grid = SamplingGrid(-3, 3, -3, 3, 201, 201)
    t0 = time.perf_counter()
    clean = synthesize(model, sensors, kgrid, QuadratureSpec(n_q=256))
    noisy = add_noise(clean, NoiseSpec(0.2, 42))
    truth = rasterize(model, grid)
    stats_clean = error_stats(indicator_grid(clean, grid), truth)
    stats_noisy = error_stats(indicator_grid(noisy, grid), truth)
    elapsed = time.perf_counter() - t0
    return stats_clean, stats_noisy, elapsed


def test_criterion_4_smooth_source_scale(smooth_run):
    stats_clean, stats_noisy, elapsed = smooth_run
    ok = (
        stats_clean.percentile_95 <= 0.01
        and stats_noisy.percentile_95 <= 0.02
        and elapsed < 300.0
    )
    _report(4, "smooth source 201x201", ok,
            f"clean p95 {stats_clean.percentile_95:.4f}, noisy p95 "
            f"{stats_noisy.percentile_95:.4f}, {elapsed:.0f} s")
    assert stats_clean.percentile_95 <= 0.01
    assert stats_noisy.percentile_95 <= 0.02
    assert elapsed < 300.0


def test_noise_degradation_under_two_x(smooth_run):
    # 20% multiplicative noise must not double the percentile-95 error.
    stats_clean, stats_noisy, _ = smooth_run
    ratio = stats_noisy.percentile_95 / stats_clean.percentile_95
    print(f"PROPERTY noise degradation: ratio {ratio:.2f}")
    assert ratio < 2.0


# ---------------------------------------------------------------------------
# 5. Monotone convergence schedule (expected red; see module docstring)
# ---------------------------------------------------------------------------
def test_criterion_5_monotone_schedule():
    model = AnalyticPeaks()
    grid = SamplingGrid(-3, 3, -3, 3, 121, 121)
    q = QuadratureSpec(n_q=256)
    truth = rasterize(model, grid)
    t0 = time.perf_counter()
    p95 = []
    for L, k_max in ((30, 15.0), (30, 30.0), (60, 30.0), (60, 50.0)):
        count = int(round((k_max - 0.1) / 0.1)) + 1
        tensor = synthesize(model, SensorArray(5.0, L), WavenumberGrid(0.1, 0.1, count), q)
        p95.append(error_stats(indicator_grid(tensor, grid), truth).percentile_95)
    elapsed = time.perf_counter() - t0
    decreasing = all(b < a for a, b in zip(p95, p95[1:]))
    seq = " -> ".join(f"{v:.3e}" for v in p95)
    ok = decreasing and elapsed < 600.0
    _report(5, "monotone (L, k_max) schedule", ok, f"p95 {seq}, {elapsed:.0f} s")
    assert elapsed < 600.0
    assert decreasing, (
        f"percentile-95 sequence {seq} is not strictly decreasing: the smooth "
        "source's spectrum is exhausted near k = 12, so raising k_max only adds "
        "the support-truncation edge signal (see decisions ledger)"
    )


# ---------------------------------------------------------------------------
# 6. Non-smooth support recovery
# ---------------------------------------------------------------------------
def _interior_mask(model, nodes, margin):
    """Nodes inside the support and at least `margin` from every boundary."""
    poly, ann = model.terms[0][0], model.terms[1][0]
    inside = eval_source_many(model, nodes) > 0.0
    verts = np.array(poly.vertices + (poly.vertices[0],))
    d_poly = np.full(nodes.shape[0], np.inf)
    for a, b in zip(verts[:-1], verts[1:]):
        ab = b - a
        t = np.clip(((nodes - a) @ ab) / float(ab @ ab), 0.0, 1.0)
        proj = a + t[:, None] * ab
        d_poly = np.minimum(d_poly, np.hypot(nodes[:, 0] - proj[:, 0], nodes[:, 1] - proj[:, 1]))
    r_ann = np.hypot(nodes[:, 0] - ann.center[0], nodes[:, 1] - ann.center[1])
    d_ann = np.minimum(np.abs(r_ann - ann.r_inner), np.abs(r_ann - ann.r_outer))
    return inside & (d_poly >= margin) & (d_ann >= margin)


def test_criterion_6_support_recovery():
    t0 = time.perf_counter()
    model = builtin_example(1)
    sensors = SensorArray(5.0, 60)
    kgrid = WavenumberGrid(0.1, 0.1, 500)  # k_max = 50
    grid = SamplingGrid(-3, 3, -3, 3, 201, 201)
    tensor = add_noise(
        synthesize(model, sensors, kgrid, QuadratureSpec(n_q=256)), NoiseSpec(0.2, 42)
    )
    indicator = indicator_grid(tensor, grid)
    truth = rasterize(model, grid)
    rec_mask = indicator.values >= 0.5
    true_mask = truth.values >= 0.5
    jaccard = np.count_nonzero(rec_mask & true_mask) / np.count_nonzero(rec_mask | true_mask)
    nodes = grid.nodes()
    interior = _interior_mask(model, nodes, 0.15)
    frac = float(np.mean(np.abs(indicator.values.ravel()[interior] - 1.0) <= 0.15))
    elapsed = time.perf_counter() - t0
    ok = jaccard >= 0.80 and frac >= 0.90
    _report(6, "hybrid support recovery", ok,
            f"jaccard {jaccard:.3f}, interior fraction {frac:.3f} of "
            f"{int(interior.sum())} nodes, {elapsed:.0f} s")
    assert jaccard >= 0.80
    assert frac >= 0.90


# ---------------------------------------------------------------------------
# 7. Pipeline determinism
# ---------------------------------------------------------------------------
def _run_pipeline(outdir: pathlib.Path, threads: int) -> dict:
    from radonsource.io_config import write_error_stats, write_heatmap

    model = builtin_example(3)
    sensors = SensorArray(5.0, 8)
    kgrid = WavenumberGrid(0.5, 0.5, 20)
    grid = SamplingGrid(-2, 2, -2, 2, 41, 41)
    outdir.mkdir(parents=True, exist_ok=True)
    tensor = add_noise(
        synthesize(model, sensors, kgrid, QuadratureSpec(n_q=64), threads=threads),
        NoiseSpec(0.2, 42),
    )
    write_field_tensor(tensor, str(outdir / "field.csv"))
    indicator = indicator_grid(read_field_tensor(str(outdir / "field.csv")), grid, threads=threads)
    write_grid(indicator, str(outdir / "indicator.csv"))
    write_heatmap(indicator, str(outdir / "indicator.ppm"))
    stats = error_stats(read_grid(str(outdir / "indicator.csv")), rasterize(model, grid))
    write_error_stats(stats, str(outdir / "stats.json"))
    write_grid(stats.error_grid, str(outdir / "error.csv"))
    write_heatmap(stats.error_grid, str(outdir / "error.ppm"))
    return {
        p.name: p.read_bytes()
        for p in sorted(outdir.iterdir())
        if p.suffix in (".csv", ".json", ".ppm")
    }


def test_criterion_7_determinism(tmp_path):
    t0 = time.perf_counter()
    runs = [
        _run_pipeline(tmp_path / "a", 1),
        _run_pipeline(tmp_path / "b", 1),
        _run_pipeline(tmp_path / "c", 2),
        _run_pipeline(tmp_path / "d", 2),
    ]
    names = sorted(runs[0])
    identical = all(r.keys() == runs[0].keys() for r in runs) and all(
        r[n] == runs[0][n] for r in runs for n in names
    )
    elapsed = time.perf_counter() - t0
    _report(7, "pipeline determinism", identical,
            f"{len(names)} artifacts x 4 runs byte-identical, {elapsed:.0f} s")
    assert identical
    assert elapsed < 300.0


# ---------------------------------------------------------------------------
# 8. Serialization round trips
# ---------------------------------------------------------------------------
def test_criterion_8_roundtrips(tmp_path):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    ok = True
    for i in range(50):
        L, M = int(rng.integers(1, 6)), int(rng.integers(2, 8))
        vals = rng.normal(size=(L, M)) * 10.0 ** rng.integers(-12, 12) + 1j * rng.normal(size=(L, M))
        noisy = bool(rng.integers(0, 2))
        prov = Provenance("noisy", float(rng.uniform(0, 1)), int(rng.integers(0, 2**31))) if noisy else Provenance("clean")
        t = FieldTensor(SensorArray(float(rng.uniform(4, 6)), L), WavenumberGrid(0.1, 0.1, M), vals, prov)
        path = str(tmp_path / f"t{i}.csv")
        write_field_tensor(t, path)
        back = read_field_tensor(path)
        ok &= bool(np.array_equal(back.values, t.values)) and back.provenance == t.provenance
    from radonsource import RealGrid

    for i in range(50):
        nx, ny = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        vals = rng.normal(size=(ny, nx)) * 10.0 ** rng.integers(-150, 150)
        grid = SamplingGrid(
            float(rng.uniform(-5, 0)), float(rng.uniform(0.1, 5)),
            float(rng.uniform(-5, 0)), float(rng.uniform(0.1, 5)), nx, ny,
        )
        g = RealGrid(grid, vals)
        path = str(tmp_path / f"g{i}.csv")
        write_grid(g, path)
        back = read_grid(path)
        ok &= back.grid == g.grid and bool(np.array_equal(back.values, g.values))
    elapsed = time.perf_counter() - t0
    _report(8, "serialization round trips", ok and elapsed < 5.0,
            f"100 random instances bitwise, {elapsed:.1f} s")
    assert ok
    assert elapsed < 5.0
