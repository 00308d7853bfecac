"""Compactly supported planar source functions and sampling grids.

A source model is one of three variants:

* ``ShapeSum`` — a sum of constant-amplitude shapes (polygons, annuli,
  disks), i.e. a piecewise-constant source built additively;
* ``RasterMask`` — amplitudes on a rectangular cell grid, evaluated by
  cell lookup (zero outside the rectangle);
* ``AnalyticPeaks`` — a fixed smooth closed-form expression (three
  Gaussian bumps with polynomial envelopes), hard-truncated to a disk so
  the support is compact.

Evaluation is pure and deterministic.  ``eval_source`` delegates to the
vectorized ``eval_source_many`` on a single point, so rasterized values
agree bit for bit with pointwise evaluation.

Boundary conventions (all half-open, for cross-platform determinism):
points on a disk or outer annulus boundary are outside, points on the
inner annulus boundary are inside; polygon membership uses the even-odd
crossing rule with lower/left edges included; raster cells cover
``[x_lo, x_hi)`` per axis.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import UsageError

__all__ = [
    "Polygon",
    "Annulus",
    "Disk",
    "ShapeSum",
    "RasterMask",
    "AnalyticPeaks",
    "SourceModel",
    "Shape",
    "SamplingGrid",
    "RealGrid",
    "contains",
    "eval_source",
    "eval_source_many",
    "rasterize",
    "builtin_example",
    "support_radius",
    "bounding_box",
]


# ---------------------------------------------------------------------------
# Shapes
# ---------------------------------------------------------------------------
def _segments_intersect(p1, p2, p3, p4) -> bool:
    """Proper or improper intersection of segments p1p2 and p3p4."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    if d1 != d2 and d3 != d4:
        return True
    if d1 == 0 and on_seg(p3, p4, p1):
        return True
    if d2 == 0 and on_seg(p3, p4, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, p3):
        return True
    if d4 == 0 and on_seg(p1, p2, p4):
        return True
    return False


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its vertex loop (at least 3 vertices)."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise UsageError(f"polygon needs at least 3 vertices, got {n}")
        for i in range(n):
            if verts[i] == verts[(i + 1) % n]:
                raise UsageError(f"polygon has a zero-length edge at vertex {i}")
        edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue  # adjacent edges share a vertex by design
                if _segments_intersect(*edges[i], *edges[j]):
                    raise UsageError(f"polygon is self-intersecting (edges {i} and {j})")


@dataclass(frozen=True)
class Annulus:
    center: tuple
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not (0.0 <= self.r_inner < self.r_outer):
            raise UsageError(
                f"annulus needs 0 <= r_inner < r_outer, got {self.r_inner}, {self.r_outer}"
            )


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.radius <= 0.0:
            raise UsageError(f"disk radius must be positive, got {self.radius}")


Shape = Union[Polygon, Annulus, Disk]


# ---------------------------------------------------------------------------
# Source model variants
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ShapeSum:
    """Sum of (shape, amplitude) terms; amplitudes add where shapes overlap."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((shape, float(amp)) for shape, amp in self.terms)
        for shape, _ in terms:
            if not isinstance(shape, (Polygon, Annulus, Disk)):
                raise UsageError(f"unsupported shape type {type(shape).__name__}")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True)
class RasterMask:
    """Amplitudes on an ny x nx cell grid covering a bounding rectangle."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    values: np.ndarray  # shape (ny, nx), row j = y cell, column i = x cell

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 2:
            raise UsageError(f"raster values must be 2-D, got shape {vals.shape}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise UsageError("raster bounding rectangle is degenerate")
        if not np.all(np.isfinite(vals)):
            raise UsageError("raster values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def nx(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class AnalyticPeaks:
    """Smooth three-bump source, hard-truncated to the disk |y| <= rho_trunc."""

    rho_trunc: float = 3.0

    def __post_init__(self):
        if self.rho_trunc <= 0.0:
            raise UsageError(f"truncation radius must be positive, got {self.rho_trunc}")


SourceModel = Union[ShapeSum, RasterMask, AnalyticPeaks]


# ---------------------------------------------------------------------------
# Membership tests
# ---------------------------------------------------------------------------
def _contains_many(shape: Shape, pts: np.ndarray) -> np.ndarray:
    px, py = pts[:, 0], pts[:, 1]
    if isinstance(shape, Disk):
        cx, cy = shape.center
        dx, dy = px - cx, py - cy
        return dx * dx + dy * dy < shape.radius * shape.radius
    if isinstance(shape, Annulus):
        cx, cy = shape.center
        dx, dy = px - cx, py - cy
        d2 = dx * dx + dy * dy
        return (d2 >= shape.r_inner * shape.r_inner) & (d2 < shape.r_outer * shape.r_outer)
    if isinstance(shape, Polygon):
        inside = np.zeros(pts.shape[0], dtype=bool)
        verts = shape.vertices
        n = len(verts)
        for i in range(n):
            x1, y1 = verts[i]
            x2, y2 = verts[(i + 1) % n]
            if y1 == y2:
                continue  # horizontal edges never produce a crossing
            crosses = (y1 > py) != (y2 > py)
            with np.errstate(invalid="ignore"):
                xint = (x2 - x1) * (py - y1) / (y2 - y1) + x1
            inside ^= crosses & (px < xint)
        return inside
    raise UsageError(f"unsupported shape type {type(shape).__name__}")


def contains(shape: Shape, point) -> bool:
    """Even-odd membership with the module's half-open boundary rules."""
    pts = np.array([[float(point[0]), float(point[1])]])
    return bool(_contains_many(shape, pts)[0])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------
def eval_source_many(model: SourceModel, pts) -> np.ndarray:
    """Evaluate the source at an (N, 2) array of points; total function."""
    pts = np.ascontiguousarray(np.asarray(pts, dtype=np.float64))
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise UsageError(f"points must have shape (N, 2), got {pts.shape}")
    if isinstance(model, ShapeSum):
        out = np.zeros(pts.shape[0])
        for shape, amp in model.terms:
            out += amp * _contains_many(shape, pts)
        return out
    if isinstance(model, RasterMask):
        dx = (model.x_max - model.x_min) / model.nx
        dy = (model.y_max - model.y_min) / model.ny
        ix = np.floor((pts[:, 0] - model.x_min) / dx).astype(np.int64)
        iy = np.floor((pts[:, 1] - model.y_min) / dy).astype(np.int64)
        ok = (ix >= 0) & (ix < model.nx) & (iy >= 0) & (iy < model.ny)
        out = np.zeros(pts.shape[0])
        out[ok] = model.values[iy[ok], ix[ok]]
        return out
    if isinstance(model, AnalyticPeaks):
        y1, y2 = pts[:, 0], pts[:, 1]
        v = (
            0.3 * (1.0 - y2) ** 2 * np.exp(-(y1**2 + (y2 + 1.0) ** 2))
            - 0.03 * np.exp(-((y1 + 1.0) ** 2 + y2**2))
            - (0.3 * y1 - y1**3 - y2**5) * np.exp(-(y1**2 + y2**2))
        )
        keep = y1 * y1 + y2 * y2 <= model.rho_trunc * model.rho_trunc
        return np.where(keep, v, 0.0)
    raise UsageError(f"unsupported source model {type(model).__name__}")


def eval_source(model: SourceModel, point) -> float:
    """Source value at one point; exactly 0 outside the support."""
    pts = np.array([[float(point[0]), float(point[1])]])
    return float(eval_source_many(model, pts)[0])


# ---------------------------------------------------------------------------
# Sampling grids
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SamplingGrid:
    """Uniform nx x ny node lattice on [x_min, x_max] x [y_min, y_max]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise UsageError("grid bounds must satisfy x_min < x_max and y_min < y_max")
        if self.nx < 2 or self.ny < 2:
            raise UsageError("grid needs at least 2 nodes per axis")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def nodes(self) -> np.ndarray:
        """All nodes as an (ny*nx, 2) array, row-major: j (y) outer, i (x) inner."""
        X, Y = np.meshgrid(self.xs(), self.ys(), indexing="xy")
        return np.column_stack([X.ravel(), Y.ravel()])

    @property
    def shape(self):
        return (self.ny, self.nx)


@dataclass(frozen=True)
class RealGrid:
    """Real values on a SamplingGrid; values[j][i] belongs to node (x_i, y_j)."""

    grid: SamplingGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.shape != self.grid.shape:
            raise UsageError(
                f"values shape {vals.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise UsageError("grid values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def rasterize(model: SourceModel, grid: SamplingGrid) -> RealGrid:
    """Sample the source at every grid node."""
    vals = eval_source_many(model, grid.nodes()).reshape(grid.shape)
    return RealGrid(grid, vals)


# ---------------------------------------------------------------------------
# Geometry summaries used by the forward solver
# ---------------------------------------------------------------------------
def _shape_radius(shape: Shape) -> float:
    if isinstance(shape, Disk):
        return float(np.hypot(*shape.center) + shape.radius)
    if isinstance(shape, Annulus):
        return float(np.hypot(*shape.center) + shape.r_outer)
    return float(max(np.hypot(x, y) for x, y in shape.vertices))


def _shape_bbox(shape: Shape):
    if isinstance(shape, Disk):
        cx, cy = shape.center
        r = shape.radius
        return (cx - r, cx + r, cy - r, cy + r)
    if isinstance(shape, Annulus):
        cx, cy = shape.center
        r = shape.r_outer
        return (cx - r, cx + r, cy - r, cy + r)
    xs = [v[0] for v in shape.vertices]
    ys = [v[1] for v in shape.vertices]
    return (min(xs), max(xs), min(ys), max(ys))


def support_radius(model: SourceModel) -> float:
    """Radius of the smallest origin-centered disk containing the support."""
    if isinstance(model, ShapeSum):
        radii = [_shape_radius(s) for s, amp in model.terms if amp != 0.0]
        return max(radii) if radii else 0.0
    if isinstance(model, RasterMask):
        iy, ix = np.nonzero(model.values)
        if ix.size == 0:
            return 0.0
        dx = (model.x_max - model.x_min) / model.nx
        dy = (model.y_max - model.y_min) / model.ny
        x_lo = model.x_min + ix * dx
        y_lo = model.y_min + iy * dy
        ax = np.maximum(np.abs(x_lo), np.abs(x_lo + dx))
        ay = np.maximum(np.abs(y_lo), np.abs(y_lo + dy))
        return float(np.max(np.hypot(ax, ay)))
    if isinstance(model, AnalyticPeaks):
        return float(model.rho_trunc)
    raise UsageError(f"unsupported source model {type(model).__name__}")


def bounding_box(model: SourceModel):
    """Axis-aligned (x_min, x_max, y_min, y_max) box containing the support."""
    if isinstance(model, ShapeSum):
        boxes = [_shape_bbox(s) for s, amp in model.terms if amp != 0.0]
        if not boxes:
            raise UsageError("shape sum has no nonzero-amplitude terms")
        return (
            min(b[0] for b in boxes),
            max(b[1] for b in boxes),
            min(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )
    if isinstance(model, RasterMask):
        return (model.x_min, model.x_max, model.y_min, model.y_max)
    if isinstance(model, AnalyticPeaks):
        r = model.rho_trunc
        return (-r, r, -r, r)
    raise UsageError(f"unsupported source model {type(model).__name__}")


# ---------------------------------------------------------------------------
# Built-in example sources
# ---------------------------------------------------------------------------
def _pentagon_annulus() -> ShapeSum:
    # Pentagon inscribed in a circle of radius 1.2 centered at (-1.4, 0),
    # first vertex pointing up; unit amplitude everywhere.
    cx, cy, r = -1.4, 0.0, 1.2
    verts = tuple(
        (cx + r * np.cos(np.pi / 2 + 2 * np.pi * i / 5), cy + r * np.sin(np.pi / 2 + 2 * np.pi * i / 5))
        for i in range(5)
    )
    return ShapeSum(((Polygon(verts), 1.0), (Annulus((1.5, 0.0), 0.5, 1.0), 1.0)))


@lru_cache(maxsize=1)
def _rabbit_mask() -> RasterMask:
    from importlib import resources

    from . import io_config

    pkg_data = resources.files("radonsource").joinpath("data")
    with resources.as_file(pkg_data.joinpath("rabbit_mask.csv")) as path:
        g = io_config.read_grid(str(path))
    # The stored grid samples cell centers; expand bounds by half a cell to
    # recover the covering rectangle.
    dx = (g.grid.x_max - g.grid.x_min) / (g.grid.nx - 1)
    dy = (g.grid.y_max - g.grid.y_min) / (g.grid.ny - 1)
    return RasterMask(
        x_min=g.grid.x_min - dx / 2,
        x_max=g.grid.x_max + dx / 2,
        y_min=g.grid.y_min - dy / 2,
        y_max=g.grid.y_max + dy / 2,
        values=g.values,
    )


def builtin_example(example_id: int) -> SourceModel:
    """Canonical example sources: 1 = polygon + annulus (unit amplitude),
    2 = piecewise-constant rabbit raster, 3 = smooth analytic peaks."""
    if example_id == 1:
        return _pentagon_annulus()
    if example_id == 2:
        return _rabbit_mask()
    if example_id == 3:
        return AnalyticPeaks(rho_trunc=3.0)
    raise UsageError(f"unknown builtin example id {example_id!r} (expected 1, 2 or 3)")
