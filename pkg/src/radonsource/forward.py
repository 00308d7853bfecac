"""Scattered-field synthesis over sensor rings and wavenumber grids.

The field radiated by a compact source S is the convolution of S with the
outgoing 2D Helmholtz kernel (i/4) H0^(1)(k|x-y|); here that integral is
discretized on a fixed raster of the source bounding box and evaluated for
every (sensor, wavenumber) pair.  Two raster rules are available:

* ``midpoint`` (default) — the source is sampled at the n_q x n_q cell
  centers, one kernel evaluation per nonzero cell.  Fast, second order,
  and the synthesis raster is deliberately unrelated to any reconstruction
  sampling grid (standard hygiene against inverse crimes).
* ``refined`` — interior cells get a 2x2 Gauss point pair per axis and
  cells straddling a support boundary are split into subcells integrated
  by exact coverage area/centroid (see coverage.py).  This pushes the
  quadrature error below 1e-6 relative even at kh ~ 0.1, at roughly 4x
  the evaluation cost; it is what the closed-form disk oracle exercises.

Multiplicative measurement noise u * (1 + delta*xi) uses a counter-based
generator: xi(seed, l, m) is derived from SHA-256 of the little-endian
int64 triple (seed, l, m); the top 53 bits of the first 8 digest bytes map
to [0, 1) and then affinely to [-1, 1).  The draw for each entry is a pure
function of (seed, l, m), so noisy tensors are bit-reproducible under any
evaluation order or worker count.
"""

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from . import coverage, sources
from .errors import DomainError, PreconditionError, UsageError
from .parallel import resolve_threads, run_tasks
from .specfun import _j0y0, bessel_j, hankel1_0
from .summation import pairwise

__all__ = [
    "SensorArray",
    "WavenumberGrid",
    "Provenance",
    "FieldTensor",
    "QuadratureSpec",
    "NoiseSpec",
    "SourceQuadrature",
    "greens",
    "disk_field_closed_form",
    "build_quadrature",
    "scattered_field",
    "synthesize",
    "add_noise",
    "noise_xi",
]

_GAUSS2_OFFSET = 1.0 / (2.0 * math.sqrt(3.0))  # +- offset of the 2-point Gauss rule
_N_SUBCELLS = 8  # per-axis split of boundary-straddling cells under "refined"


# ---------------------------------------------------------------------------
# Measurement geometry and frequency grid
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SensorArray:
    """L receivers equispaced on the circle of radius R about the origin."""

    radius: float
    count: int

    def __post_init__(self):
        if self.radius <= 0.0:
            raise UsageError(f"sensor radius must be positive, got {self.radius}")
        if self.count < 1:
            raise UsageError(f"sensor count must be >= 1, got {self.count}")

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.count) / self.count

    def positions(self) -> np.ndarray:
        """(L, 2) array of sensor coordinates R*(cos, sin)."""
        th = self.angles()
        return np.column_stack([self.radius * np.cos(th), self.radius * np.sin(th)])


@dataclass(frozen=True)
class WavenumberGrid:
    """k_m = k_min + (m-1)*dk for m = 1..count."""

    k_min: float
    dk: float
    count: int

    def __post_init__(self):
        if self.k_min <= 0.0:
            raise UsageError(f"k_min must be positive, got {self.k_min}")
        if self.dk <= 0.0:
            raise UsageError(f"dk must be positive, got {self.dk}")
        if self.count < 1:
            raise UsageError(f"wavenumber count must be >= 1, got {self.count}")

    @property
    def k_max(self) -> float:
        return self.k_min + (self.count - 1) * self.dk

    def ks(self) -> np.ndarray:
        return self.k_min + np.arange(self.count) * self.dk


@dataclass(frozen=True)
class Provenance:
    kind: str  # "clean" or "noisy"
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("clean", "noisy"):
            raise UsageError(f"provenance kind must be clean or noisy, got {self.kind!r}")


@dataclass(frozen=True)
class FieldTensor:
    """Complex scattered-field samples, shape (L, M), plus their metadata."""

    sensors: SensorArray
    wavenumbers: WavenumberGrid
    values: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.complex128))
        expected = (self.sensors.count, self.wavenumbers.count)
        if vals.shape != expected:
            raise UsageError(f"field values shape {vals.shape} does not match {expected}")
        if not np.all(np.isfinite(vals)):
            raise UsageError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class QuadratureSpec:
    """Source raster: n_q cells per axis over the support bounding box."""

    n_q: int = 512
    rule: str = "midpoint"

    def __post_init__(self):
        if self.n_q < 32:
            raise UsageError(f"quadrature resolution must be >= 32, got {self.n_q}")
        if self.rule not in ("midpoint", "refined"):
            raise UsageError(f"quadrature rule must be midpoint or refined, got {self.rule!r}")


@dataclass(frozen=True)
class NoiseSpec:
    delta: float
    seed: int

    def __post_init__(self):
        if self.delta < 0.0:
            raise UsageError(f"noise level must be nonnegative, got {self.delta}")


# ---------------------------------------------------------------------------
# Green's function
# ---------------------------------------------------------------------------
def disk_field_closed_form(k: float, radius: float, amplitude: float, rho: float) -> complex:
    """Field radiated by a constant disk source centered at the origin,
    observed at distance rho > radius:

        u(k) = (i/4) * (2*pi*a/k) * J1(k*a) * H0^(1)(k*rho) * amplitude.

    Exact (up to kernel precision); the independent check for the raster
    quadrature.
    """
    if rho <= radius:
        raise DomainError("closed form requires the observation point outside the disk")
    return 0.25j * (2.0 * math.pi * radius / k) * bessel_j(1, k * radius) * hankel1_0(k * rho) * amplitude


def greens(k: float, x, y) -> complex:
    """Outgoing 2D Helmholtz kernel (i/4) H0^(1)(k |x - y|)."""
    if k <= 0.0 or not math.isfinite(k):
        raise DomainError(f"wavenumber must be positive and finite, got {k!r}")
    dx = float(x[0]) - float(y[0])
    dy = float(x[1]) - float(y[1])
    r = math.sqrt(dx * dx + dy * dy)
    if r == 0.0:
        raise DomainError("kernel singularity: x == y")
    return 0.25j * hankel1_0(k * r)


# ---------------------------------------------------------------------------
# Source quadrature construction
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SourceQuadrature:
    """Weighted point set with the source amplitude folded into the weights:
    integral of Phi_k(x, .) * S is approximated by sum w_j * Phi_k(x, y_j)."""

    points: np.ndarray  # (N, 2)
    weights: np.ndarray  # (N,)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        wts = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 2 or wts.shape != (pts.shape[0],):
            raise UsageError("malformed quadrature arrays")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)


def _cell_lattice(bbox, n_q):
    x_min, x_max, y_min, y_max = bbox
    hx = (x_max - x_min) / n_q
    hy = (y_max - y_min) / n_q
    cx = x_min + (np.arange(n_q) + 0.5) * hx
    cy = y_min + (np.arange(n_q) + 0.5) * hy
    X, Y = np.meshgrid(cx, cy, indexing="xy")
    return X.ravel(), Y.ravel(), hx, hy


def _midpoint_quadrature(model, bbox, n_q) -> SourceQuadrature:
    X, Y, hx, hy = _cell_lattice(bbox, n_q)
    vals = sources.eval_source_many(model, np.column_stack([X, Y]))
    keep = vals != 0.0
    return SourceQuadrature(
        np.column_stack([X[keep], Y[keep]]), vals[keep] * (hx * hy)
    )


def _gauss2_points(cx, cy, hx, hy):
    """2x2 Gauss points and per-point area weights for cells centered at (cx, cy)."""
    ox, oy = _GAUSS2_OFFSET * hx, _GAUSS2_OFFSET * hy
    pts = []
    for sx in (-ox, ox):
        for sy in (-oy, oy):
            pts.append(np.column_stack([cx + sx, cy + sy]))
    return pts, hx * hy / 4.0


def _refined_circle_term(cx_arr, cy_arr, hx, hy, center, rho, amp, pts_out, wts_out):
    """Append quadrature points for a constant-amplitude disk term."""
    ccx, ccy = center
    # Classify every cell by corner distances (vectorized).
    dxn = np.maximum(np.abs(cx_arr - ccx) - hx / 2, 0.0)
    dyn = np.maximum(np.abs(cy_arr - ccy) - hy / 2, 0.0)
    dxf = np.abs(cx_arr - ccx) + hx / 2
    dyf = np.abs(cy_arr - ccy) + hy / 2
    rmin2 = dxn * dxn + dyn * dyn
    rmax2 = dxf * dxf + dyf * dyf
    rho2 = rho * rho
    full = rmax2 < rho2
    straddle = (rmin2 < rho2) & ~full

    gpts, gw = _gauss2_points(cx_arr[full], cy_arr[full], hx, hy)
    for p in gpts:
        pts_out.append(p)
        wts_out.append(np.full(p.shape[0], amp * gw))

    ns = _N_SUBCELLS
    hsx, hsy = hx / ns, hy / ns
    sub_off_x = (np.arange(ns) + 0.5) * hsx - hx / 2
    sub_off_y = (np.arange(ns) + 0.5) * hsy - hy / 2
    for scx, scy in zip(cx_arr[straddle], cy_arr[straddle]):
        for oy in sub_off_y:
            for ox in sub_off_x:
                px, py = scx + ox, scy + oy
                x1, x2 = px - hsx / 2, px + hsx / 2
                y1, y2 = py - hsy / 2, py + hsy / 2
                cls = coverage.classify_circle_rect(ccx, ccy, rho, x1, x2, y1, y2)
                if cls == -1:
                    continue
                if cls == 1:
                    pts_out.append(np.array([[px, py]]))
                    wts_out.append(np.array([amp * hsx * hsy]))
                    continue
                area, gx, gy = coverage.circle_rect_coverage(ccx, ccy, rho, x1, x2, y1, y2)
                if area > 0.0:
                    pts_out.append(np.array([[gx, gy]]))
                    wts_out.append(np.array([amp * area]))


def _refined_polygon_term(cx_arr, cy_arr, hx, hy, poly, amp, pts_out, wts_out):
    """Append quadrature points for a constant-amplitude polygon term.

    Cell classification samples the indicator at subcell resolution; the
    straddle band falls back to dense sampled coverage, which is accurate
    to the subsample scale (piecewise-constant sources never face the
    sub-1e-6 oracle, so this is sufficient).
    """
    corners = [
        np.column_stack([cx_arr + sx * hx / 2, cy_arr + sy * hy / 2])
        for sx in (-1, 1)
        for sy in (-1, 1)
    ]
    inside_counts = sum(
        sources._contains_many(poly, c).astype(np.int64) for c in corners
    )
    center_in = sources._contains_many(poly, np.column_stack([cx_arr, cy_arr]))
    # A cell is treated as interior only when all corners and the center
    # agree; an edge could still clip a corner region, so interior cells
    # additionally keep a safety margin of one subsampled straddle band.
    maybe_full = (inside_counts == 4) & center_in
    maybe_empty = (inside_counts == 0) & ~center_in
    straddle = ~(maybe_full | maybe_empty)
    # Edges can cross a cell whose corners and center all sit on one side;
    # catch those by distance from cell center to each polygon edge.
    verts = np.array(poly.vertices + (poly.vertices[0],))
    seg_a, seg_b = verts[:-1], verts[1:]
    half_diag = math.hypot(hx, hy) / 2
    cpts = np.column_stack([cx_arr, cy_arr])
    near_edge = np.zeros(cx_arr.shape[0], dtype=bool)
    for a, b in zip(seg_a, seg_b):
        ab = b - a
        denom = float(ab @ ab)
        t = np.clip(((cpts - a) @ ab) / denom, 0.0, 1.0) if denom > 0 else 0.0
        closest = a + np.atleast_1d(t)[:, None] * ab
        d = np.hypot(cpts[:, 0] - closest[:, 0], cpts[:, 1] - closest[:, 1])
        near_edge |= d <= half_diag
    straddle |= near_edge & (maybe_full | maybe_empty)
    full = maybe_full & ~straddle

    gpts, gw = _gauss2_points(cx_arr[full], cy_arr[full], hx, hy)
    for p in gpts:
        pts_out.append(p)
        wts_out.append(np.full(p.shape[0], amp * gw))

    indicator = lambda pts: sources._contains_many(poly, pts)
    for scx, scy in zip(cx_arr[straddle], cy_arr[straddle]):
        area, gx, gy = coverage.sampled_coverage(
            indicator, scx - hx / 2, scx + hx / 2, scy - hy / 2, scy + hy / 2, n_sub=64
        )
        if area > 0.0:
            pts_out.append(np.array([[gx, gy]]))
            wts_out.append(np.array([area * amp]))


def _refined_analytic(model, bbox, n_q) -> SourceQuadrature:
    """Gauss 2x2 inside the truncation disk, coverage-weighted edge cells."""
    X, Y, hx, hy = _cell_lattice(bbox, n_q)
    rho = model.rho_trunc
    pts_out, wts_out = [], []
    dxf = np.abs(X) + hx / 2
    dyf = np.abs(Y) + hy / 2
    dxn = np.maximum(np.abs(X) - hx / 2, 0.0)
    dyn = np.maximum(np.abs(Y) - hy / 2, 0.0)
    full = dxf * dxf + dyf * dyf < rho * rho
    straddle = (dxn * dxn + dyn * dyn < rho * rho) & ~full

    gpts, gw = _gauss2_points(X[full], Y[full], hx, hy)
    for p in gpts:
        vals = sources.eval_source_many(model, p)
        pts_out.append(p)
        wts_out.append(vals * gw)

    ns = _N_SUBCELLS
    hsx, hsy = hx / ns, hy / ns
    sub_off_x = (np.arange(ns) + 0.5) * hsx - hx / 2
    sub_off_y = (np.arange(ns) + 0.5) * hsy - hy / 2
    for scx, scy in zip(X[straddle], Y[straddle]):
        for oy in sub_off_y:
            for ox in sub_off_x:
                px, py = scx + ox, scy + oy
                x1, x2 = px - hsx / 2, px + hsx / 2
                y1, y2 = py - hsy / 2, py + hsy / 2
                cls = coverage.classify_circle_rect(0.0, 0.0, rho, x1, x2, y1, y2)
                if cls == -1:
                    continue
                if cls == 1:
                    area, gx, gy = hsx * hsy, px, py
                else:
                    area, gx, gy = coverage.circle_rect_coverage(0.0, 0.0, rho, x1, x2, y1, y2)
                    if area <= 0.0:
                        continue
                val = sources.eval_source(model, (gx, gy))
                if val != 0.0:
                    pts_out.append(np.array([[gx, gy]]))
                    wts_out.append(np.array([val * area]))
    if not pts_out:
        return SourceQuadrature(np.zeros((0, 2)), np.zeros(0))
    return SourceQuadrature(np.vstack(pts_out), np.concatenate(wts_out))


def build_quadrature(model, spec: QuadratureSpec) -> SourceQuadrature:
    """Turn a source model into the weighted point set of the chosen rule."""
    if isinstance(model, sources.ShapeSum) and all(amp == 0.0 for _, amp in model.terms):
        return SourceQuadrature(np.zeros((0, 2)), np.zeros(0))
    bbox = sources.bounding_box(model)
    if spec.rule == "midpoint" or isinstance(model, sources.RasterMask):
        return _midpoint_quadrature(model, bbox, spec.n_q)
    if isinstance(model, sources.AnalyticPeaks):
        return _refined_analytic(model, bbox, spec.n_q)
    # ShapeSum: each term contributes independently (the sum is linear);
    # annuli split into outer-disk minus inner-disk coverage.
    X, Y, hx, hy = _cell_lattice(bbox, spec.n_q)
    pts_out, wts_out = [], []
    for shape, amp in model.terms:
        if amp == 0.0:
            continue
        if isinstance(shape, sources.Disk):
            _refined_circle_term(X, Y, hx, hy, shape.center, shape.radius, amp, pts_out, wts_out)
        elif isinstance(shape, sources.Annulus):
            _refined_circle_term(X, Y, hx, hy, shape.center, shape.r_outer, amp, pts_out, wts_out)
            _refined_circle_term(X, Y, hx, hy, shape.center, shape.r_inner, -amp, pts_out, wts_out)
        else:
            _refined_polygon_term(X, Y, hx, hy, shape, amp, pts_out, wts_out)
    if not pts_out:
        return SourceQuadrature(np.zeros((0, 2)), np.zeros(0))
    return SourceQuadrature(np.vstack(pts_out), np.concatenate(wts_out))


# ---------------------------------------------------------------------------
# Field evaluation
# ---------------------------------------------------------------------------
@njit(cache=True, nogil=True)
def _field_row(r, w, ks, buf_j, buf_y, out_re, out_im):
    """u(k_m) = (i/4) sum_j w_j H0(k_m r_j) for one sensor, all m."""
    n = r.shape[0]
    for m in range(ks.shape[0]):
        k = ks[m]
        for j in range(n):
            jj, yy = _j0y0(k * r[j])
            buf_j[j] = w[j] * jj
            buf_y[j] = w[j] * yy
        out_im[m] = 0.25 * pairwise(buf_j, 0, n)
        out_re[m] = -0.25 * pairwise(buf_y, 0, n)


def _distances(x, pts):
    dx = pts[:, 0] - x[0]
    dy = pts[:, 1] - x[1]
    return np.sqrt(dx * dx + dy * dy)


def scattered_field(
    model,
    x,
    k: float,
    q: QuadratureSpec,
    quad: Optional[SourceQuadrature] = None,
) -> complex:
    """Raster-quadrature approximation of the radiated field at point x."""
    if k <= 0.0 or not math.isfinite(k):
        raise DomainError(f"wavenumber must be positive and finite, got {k!r}")
    x = (float(x[0]), float(x[1]))
    rx = math.hypot(x[0], x[1])
    if rx <= sources.support_radius(model):
        raise PreconditionError(
            f"evaluation point at radius {rx:.6g} lies inside the source "
            f"support disk (radius {sources.support_radius(model):.6g})"
        )
    if quad is None:
        quad = build_quadrature(model, q)
    if quad.points.shape[0] == 0:
        return 0.0 + 0.0j
    r = _distances(x, quad.points)
    ks = np.array([float(k)])
    buf_j = np.empty(r.shape[0])
    buf_y = np.empty(r.shape[0])
    out_re = np.empty(1)
    out_im = np.empty(1)
    _field_row(r, quad.weights, ks, buf_j, buf_y, out_re, out_im)
    return complex(out_re[0], out_im[0])


def synthesize(
    model,
    sensors: SensorArray,
    kgrid: WavenumberGrid,
    q: QuadratureSpec,
    threads: Optional[int] = None,
) -> FieldTensor:
    """Clean field tensor over all sensors and wavenumbers.

    Rows (sensors) are computed independently, one worker task per row, so
    the result is bit-identical for any worker count.
    """
    margin = sensors.radius - sources.support_radius(model)
    if margin <= 0.0:
        raise PreconditionError(
            f"source support (radius {sources.support_radius(model):.6g}) must lie "
            f"strictly inside the sensor circle (radius {sensors.radius:.6g})"
        )
    quad = build_quadrature(model, q)
    ks = kgrid.ks()
    L, M = sensors.count, kgrid.count
    values = np.zeros((L, M), dtype=np.complex128)
    if quad.points.shape[0] == 0:
        return FieldTensor(sensors, kgrid, values, Provenance("clean"))
    positions = sensors.positions()

    def row(l):
        r = _distances(positions[l], quad.points)
        buf_j = np.empty(r.shape[0])
        buf_y = np.empty(r.shape[0])
        out_re = np.empty(M)
        out_im = np.empty(M)
        _field_row(r, quad.weights, ks, buf_j, buf_y, out_re, out_im)
        return out_re + 1j * out_im

    rows = run_tasks(row, [(l,) for l in range(L)], resolve_threads(threads))
    for l, vals in enumerate(rows):
        values[l] = vals
    return FieldTensor(sensors, kgrid, values, Provenance("clean"))


# ---------------------------------------------------------------------------
# Noise
# ---------------------------------------------------------------------------
def noise_xi(seed: int, l: int, m: int) -> float:
    """Deterministic uniform draw on [-1, 1) for entry (l, m)."""
    digest = hashlib.sha256(struct.pack("<qqq", seed, l, m)).digest()
    u = int.from_bytes(digest[:8], "little") >> 11  # top 53 bits
    return 2.0 * (u * 2.0**-53) - 1.0


def add_noise(t: FieldTensor, n: NoiseSpec) -> FieldTensor:
    """Entrywise multiplicative perturbation u * (1 + delta * xi_lm)."""
    if t.provenance.kind != "clean":
        raise UsageError("tensor already carries noise; refusing to noise it twice")
    L, M = t.values.shape
    xi = np.empty((L, M))
    for l in range(L):
        for m in range(M):
            xi[l, m] = noise_xi(n.seed, l, m)
    noisy = t.values * (1.0 + n.delta * xi)
    return FieldTensor(t.sensors, t.wavenumbers, noisy, Provenance("noisy", n.delta, n.seed))
