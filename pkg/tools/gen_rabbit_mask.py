#!/usr/bin/env python3
"""Generate the bundled piecewise-constant rabbit raster (builtin example 2).

Paints a rabbit silhouette from overlapping disks onto a 180x200 cell grid
(cells of 0.02 units) with three amplitude levels {0.5, 1.0, 1.5}, then
stores it in the grid CSV format at src/radonsource/data/rabbit_mask.csv
(nodes = cell centers; the loader re-expands to the covering rectangle).
Deterministic; regenerate with

    python tools/gen_rabbit_mask.py
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from radonsource.io_config import write_grid  # noqa: E402
from radonsource.sources import RealGrid, SamplingGrid  # noqa: E402

# (cx, cy, radius, amplitude); later entries overwrite earlier ones.
_DISKS = [
    # body
    (0.00, -0.70, 1.00, 1.0),
    (0.15, -0.35, 0.80, 1.0),
    # head
    (0.05, 0.55, 0.55, 1.0),
    # ears (three disks each, slightly splayed)
    (-0.22, 1.05, 0.22, 1.5),
    (-0.30, 1.40, 0.22, 1.5),
    (-0.38, 1.72, 0.20, 1.5),
    (0.28, 1.05, 0.22, 1.5),
    (0.36, 1.40, 0.22, 1.5),
    (0.44, 1.72, 0.20, 1.5),
    # tail
    (0.95, -1.05, 0.28, 0.5),
    # belly patch
    (0.10, -0.55, 0.42, 1.5),
]

X_MIN, X_MAX = -1.8, 1.8
Y_MIN, Y_MAX = -1.8, 2.2
NX, NY = 180, 200


def main() -> int:
    dx = (X_MAX - X_MIN) / NX
    dy = (Y_MAX - Y_MIN) / NY
    cx = X_MIN + (np.arange(NX) + 0.5) * dx
    cy = Y_MIN + (np.arange(NY) + 0.5) * dy
    X, Y = np.meshgrid(cx, cy, indexing="xy")
    vals = np.zeros((NY, NX))
    for dcx, dcy, r, amp in _DISKS:
        vals[(X - dcx) ** 2 + (Y - dcy) ** 2 < r * r] = amp

    worst = np.max(np.hypot(np.abs(X) + dx / 2, np.abs(Y) + dy / 2)[vals != 0.0])
    assert worst < 3.0, f"support reaches radius {worst}"

    grid = SamplingGrid(float(cx[0]), float(cx[-1]), float(cy[0]), float(cy[-1]), NX, NY)
    out = pathlib.Path(__file__).resolve().parent.parent / "src" / "radonsource" / "data" / "rabbit_mask.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_grid(RealGrid(grid, vals), str(out))
    print(f"wrote {out}: {int(np.count_nonzero(vals))} nonzero cells, max radius {worst:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
