"""Bit-exact file formats and experiment configuration.

Formats (all UTF-8, ``\\n`` line endings, floats as Python shortest
round-trip decimals, writes atomic via temp file + rename):

* field tensor — CSV with header ``l,m,sensor_x,sensor_y,k,re,im``, rows
  in l-major / m-minor order, plus a JSON sidecar ``<path>.meta.json``
  holding R, L, k_min, dk, M and the provenance record;
* real grid — CSV with header ``i,j,z1,z2,value``, rows j-outer / i-inner,
  plus a sidecar with the grid bounds and dimensions (node coordinates are
  reconstructed from bounds and indices, and verified on read);
* heatmap — binary PPM (P6), one pixel per node, written top row first.
  With value range [lo, hi], u = clip(2*(v-lo)/(hi-lo) - 1, -1, 1) maps to
  (rint(255*(1+u)), rint(255*(1+u)), 255) for u < 0 and
  (255, rint(255*(1-u)), rint(255*(1-u))) otherwise, rint rounding half to
  even; the default range is symmetric about zero at max |value| (and
  [-1, 1] for an all-zero grid, so zero always lands on the white midpoint).

The plain-text config format is ``key = value`` per line with ``#``
comments; every key mirrors a CLI flag and unknown keys are rejected by
name.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ParseError, UsageError
from .forward import FieldTensor, Provenance, QuadratureSpec, SensorArray, WavenumberGrid
from .sources import RasterMask, RealGrid, SamplingGrid

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "write_field_tensor",
    "read_field_tensor",
    "write_grid",
    "read_grid",
    "read_raster_mask",
    "write_heatmap",
    "write_error_stats",
]


# ---------------------------------------------------------------------------
# Atomic write helper
# ---------------------------------------------------------------------------
def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp defaults to 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sidecar(path: str) -> str:
    return path + ".meta.json"


# ---------------------------------------------------------------------------
# Field tensor
# ---------------------------------------------------------------------------
def write_field_tensor(t: FieldTensor, path: str) -> None:
    pos = t.sensors.positions()
    ks = t.wavenumbers.ks()
    lines = ["l,m,sensor_x,sensor_y,k,re,im"]
    for l in range(t.sensors.count):
        sx, sy = repr(float(pos[l, 0])), repr(float(pos[l, 1]))
        for m in range(t.wavenumbers.count):
            v = t.values[l, m]
            lines.append(
                f"{l},{m},{sx},{sy},{float(ks[m])!r},{float(v.real)!r},{float(v.imag)!r}"
            )
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
    meta = {
        "R": t.sensors.radius,
        "L": t.sensors.count,
        "k_min": t.wavenumbers.k_min,
        "dk": t.wavenumbers.dk,
        "M": t.wavenumbers.count,
        "provenance": {
            "kind": t.provenance.kind,
            "delta": t.provenance.delta,
            "seed": t.provenance.seed,
        },
    }
    _atomic_write(_sidecar(path), (json.dumps(meta, indent=2) + "\n").encode())


def _load_sidecar(path: str, required) -> dict:
    side = _sidecar(path)
    if not os.path.exists(side):
        raise ParseError(f"missing sidecar {side}")
    try:
        with open(side, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed sidecar {side}: {exc}") from exc
    for key in required:
        if key not in meta:
            raise ParseError(f"sidecar {side} is missing key {key!r}")
    return meta


def read_field_tensor(path: str) -> FieldTensor:
    meta = _load_sidecar(path, ("R", "L", "k_min", "dk", "M", "provenance"))
    sensors = SensorArray(float(meta["R"]), int(meta["L"]))
    kgrid = WavenumberGrid(float(meta["k_min"]), float(meta["dk"]), int(meta["M"]))
    prov_raw = meta["provenance"]
    provenance = Provenance(
        str(prov_raw.get("kind", "")),
        float(prov_raw.get("delta", 0.0)),
        int(prov_raw.get("seed", 0)),
    )
    L, M = sensors.count, kgrid.count
    pos = sensors.positions()
    ks = kgrid.ks()
    values = np.empty((L, M), dtype=np.complex128)

    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != "l,m,sensor_x,sensor_y,k,re,im":
            raise ParseError(f"{path}: unexpected header {header!r}")
        count = 0
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise ParseError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
            try:
                l, m = int(parts[0]), int(parts[1])
                sx, sy, k = float(parts[2]), float(parts[3]), float(parts[4])
                re, im = float(parts[5]), float(parts[6])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            expect_l, expect_m = count // M, count % M
            if (l, m) != (expect_l, expect_m):
                raise ParseError(
                    f"{path}:{lineno}: rows must be l-major; expected (l, m) = "
                    f"({expect_l}, {expect_m}), got ({l}, {m})"
                )
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ParseError(f"{path}:{lineno}: non-finite field value")
            if sx != pos[l, 0] or sy != pos[l, 1] or k != ks[m]:
                raise ParseError(
                    f"{path}:{lineno}: sensor/wavenumber columns disagree with sidecar"
                )
            values[l, m] = complex(re, im)
            count += 1
    if count != L * M:
        raise ParseError(f"{path}: expected {L * M} data rows, found {count}")
    return FieldTensor(sensors, kgrid, values, provenance)


# ---------------------------------------------------------------------------
# Real grids
# ---------------------------------------------------------------------------
def write_grid(g: RealGrid, path: str) -> None:
    xs = g.grid.xs()
    ys = g.grid.ys()
    lines = ["i,j,z1,z2,value"]
    for j in range(g.grid.ny):
        z2 = repr(float(ys[j]))
        for i in range(g.grid.nx):
            lines.append(f"{i},{j},{float(xs[i])!r},{z2},{float(g.values[j, i])!r}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
    meta = {
        "x_min": g.grid.x_min,
        "x_max": g.grid.x_max,
        "y_min": g.grid.y_min,
        "y_max": g.grid.y_max,
        "nx": g.grid.nx,
        "ny": g.grid.ny,
    }
    _atomic_write(_sidecar(path), (json.dumps(meta, indent=2) + "\n").encode())


def read_grid(path: str) -> RealGrid:
    meta = _load_sidecar(path, ("x_min", "x_max", "y_min", "y_max", "nx", "ny"))
    grid = SamplingGrid(
        float(meta["x_min"]), float(meta["x_max"]),
        float(meta["y_min"]), float(meta["y_max"]),
        int(meta["nx"]), int(meta["ny"]),
    )
    xs = grid.xs()
    ys = grid.ys()
    values = np.empty(grid.shape)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != "i,j,z1,z2,value":
            raise ParseError(f"{path}: unexpected header {header!r}")
        count = 0
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            try:
                i, j = int(parts[0]), int(parts[1])
                z1, z2, val = float(parts[2]), float(parts[3]), float(parts[4])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            expect_j, expect_i = count // grid.nx, count % grid.nx
            if (i, j) != (expect_i, expect_j):
                raise ParseError(
                    f"{path}:{lineno}: rows must be j-outer; expected (i, j) = "
                    f"({expect_i}, {expect_j}), got ({i}, {j})"
                )
            if not math.isfinite(val):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            if z1 != xs[i] or z2 != ys[j]:
                raise ParseError(f"{path}:{lineno}: node coordinates disagree with sidecar")
            values[j, i] = val
            count += 1
    if count != grid.nx * grid.ny:
        raise ParseError(f"{path}: expected {grid.nx * grid.ny} data rows, found {count}")
    return RealGrid(grid, values)


def read_raster_mask(path: str) -> RasterMask:
    """Load a RasterMask stored in the grid format; the stored nodes are
    cell centers, so the covering rectangle extends half a cell beyond."""
    g = read_grid(path)
    dx = (g.grid.x_max - g.grid.x_min) / (g.grid.nx - 1)
    dy = (g.grid.y_max - g.grid.y_min) / (g.grid.ny - 1)
    return RasterMask(
        x_min=g.grid.x_min - dx / 2,
        x_max=g.grid.x_max + dx / 2,
        y_min=g.grid.y_min - dy / 2,
        y_max=g.grid.y_max + dy / 2,
        values=g.values,
    )


# ---------------------------------------------------------------------------
# Heatmaps
# ---------------------------------------------------------------------------
def write_heatmap(g: RealGrid, path: str, vrange: Optional[tuple] = None) -> None:
    vals = g.values
    if vals.size == 0:
        raise UsageError("cannot render an empty grid")
    if vrange is None:
        peak = float(np.max(np.abs(vals)))
        lo, hi = (-peak, peak) if peak > 0.0 else (-1.0, 1.0)
    else:
        lo, hi = float(vrange[0]), float(vrange[1])
        if not lo < hi:
            raise UsageError(f"heatmap range must satisfy lo < hi, got ({lo}, {hi})")
    u = np.clip(2.0 * (vals - lo) / (hi - lo) - 1.0, -1.0, 1.0)
    r = np.where(u < 0.0, np.rint(255.0 * (1.0 + u)), 255.0)
    b = np.where(u < 0.0, 255.0, np.rint(255.0 * (1.0 - u)))
    gch = np.where(u < 0.0, np.rint(255.0 * (1.0 + u)), np.rint(255.0 * (1.0 - u)))
    rgb = np.stack([r, gch, b], axis=-1).astype(np.uint8)
    rgb = rgb[::-1, :, :]  # top image row = largest y
    header = f"P6\n{g.grid.nx} {g.grid.ny}\n255\n".encode()
    _atomic_write(path, header + rgb.tobytes())


def write_error_stats(stats, path: str) -> None:
    _atomic_write(path, (json.dumps(stats.as_dict(), indent=2) + "\n").encode())


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------
_GRID_KEYS = ("x0", "x1", "y0", "y1", "nx", "ny")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one synthesis/reconstruction experiment."""

    example: Optional[int] = 3
    source_file: Optional[str] = None
    R: float = 5.0
    L: int = 30
    k_min: float = 0.1
    k_max: float = 30.0
    dk: float = 0.1
    delta: float = 0.2
    seed: int = 0
    grid_bounds: tuple = (-3.0, 3.0, -3.0, 3.0)
    nx: int = 601
    ny: int = 601
    n_q: int = 512
    output_dir: str = "."

    def validate(self) -> "ExperimentConfig":
        if self.example is not None and self.example not in (1, 2, 3):
            raise UsageError(f"example must be 1, 2 or 3, got {self.example}")
        if self.example is None and self.source_file is None:
            raise UsageError("either example or source-file must be given")
        if self.R <= 0.0:
            raise UsageError(f"R must be positive, got {self.R}")
        if self.L < 1:
            raise UsageError(f"L must be >= 1, got {self.L}")
        if self.k_min <= 0.0:
            raise UsageError(f"kmin must be positive, got {self.k_min}")
        if self.dk <= 0.0:
            raise UsageError(f"dk must be positive, got {self.dk}")
        if self.k_max < self.k_min:
            raise UsageError(f"kmax must be >= kmin, got {self.k_max} < {self.k_min}")
        steps = (self.k_max - self.k_min) / self.dk
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise UsageError(
                f"dk={self.dk} does not evenly divide [{self.k_min}, {self.k_max}]"
            )
        if self.delta < 0.0:
            raise UsageError(f"delta must be nonnegative, got {self.delta}")
        x0, x1, y0, y1 = self.grid_bounds
        if not (x0 < x1 and y0 < y1):
            raise UsageError(f"grid bounds must be increasing, got {self.grid_bounds}")
        if self.nx < 2 or self.ny < 2:
            raise UsageError(f"grid needs nx, ny >= 2, got {self.nx}x{self.ny}")
        if self.n_q < 32:
            raise UsageError(f"nq must be >= 32, got {self.n_q}")
        return self

    # Derived pipeline objects -------------------------------------------
    def sensors(self) -> SensorArray:
        return SensorArray(self.R, self.L)

    def kgrid(self) -> WavenumberGrid:
        count = int(round((self.k_max - self.k_min) / self.dk)) + 1
        return WavenumberGrid(self.k_min, self.dk, count)

    def sampling_grid(self) -> SamplingGrid:
        x0, x1, y0, y1 = self.grid_bounds
        return SamplingGrid(x0, x1, y0, y1, self.nx, self.ny)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(n_q=self.n_q)

    def source_model(self):
        from . import sources as _sources

        if self.source_file is not None:
            return read_raster_mask(self.source_file)
        return _sources.builtin_example(self.example)


def _parse_grid_spec(text: str):
    parts = text.split(",")
    if len(parts) != 6:
        raise UsageError(
            f"grid expects 6 comma-separated values x0,x1,y0,y1,nx,ny, got {text!r}"
        )
    try:
        x0, x1, y0, y1 = (float(p) for p in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
    except ValueError as exc:
        raise UsageError(f"grid: {exc}") from exc
    return (x0, x1, y0, y1), nx, ny


_CONFIG_PARSERS = {
    "R": ("R", float),
    "L": ("L", int),
    "kmin": ("k_min", float),
    "kmax": ("k_max", float),
    "dk": ("dk", float),
    "delta": ("delta", float),
    "seed": ("seed", int),
    "nq": ("n_q", int),
    "output": ("output_dir", str),
}


def parse_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Config file plus CLI overrides; overrides win key by key."""
    cfg = ExperimentConfig()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read config {path}: {exc}") from exc
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            cfg = _apply_key(cfg, key, value, f"{path}:{lineno}")
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            cfg = _apply_key(cfg, key, value, "command line")
    return cfg.validate()


def _apply_key(cfg: ExperimentConfig, key: str, value, where: str) -> ExperimentConfig:
    if key == "grid":
        bounds, nx, ny = _parse_grid_spec(str(value))
        return replace(cfg, grid_bounds=bounds, nx=nx, ny=ny)
    if key in ("source-file", "source_file"):
        return replace(cfg, source_file=str(value), example=None)
    if key == "example":
        try:
            ex = int(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{where}: bad value for 'example': {exc}") from exc
        return replace(cfg, example=ex, source_file=None)
    if key not in _CONFIG_PARSERS:
        raise UsageError(f"{where}: unknown config key {key!r}")
    field, conv = _CONFIG_PARSERS[key]
    try:
        converted = conv(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{where}: bad value for {key!r}: {exc}") from exc
    return replace(cfg, **{field: converted})
