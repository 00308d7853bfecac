#!/usr/bin/env python3
"""Generate arbitrary-precision reference values for the Bessel kernels.

Writes tests/data/specfun_oracle.csv with columns x,j0,j1,y0,y1 for 2000
log-spaced arguments in (1e-2, 1000], each value computed with mpmath at
40 significant digits and rounded to the nearest double.  The test suite
compares the production kernels against this file; regenerate with

    python tools/gen_specfun_oracle.py

The grid is deterministic (no RNG), so the file is reproducible bit for bit.
"""

import csv
import pathlib
import sys

import mpmath as mp

N_POINTS = 2000
X_LO = 1e-2
X_HI = 1e3

mp.mp.dps = 40


def log_spaced(n: int, lo: float, hi: float) -> list[float]:
    """n log-spaced doubles with endpoints lo and hi included."""
    import math

    la, lb = math.log10(lo), math.log10(hi)
    return [10.0 ** (la + (lb - la) * i / (n - 1)) for i in range(n)]


def main() -> int:
    out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "specfun_oracle.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    xs = log_spaced(N_POINTS, X_LO, X_HI)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "j0", "j1", "y0", "y1"])
        for x in xs:
            mx = mp.mpf(x)
            row = [
                repr(x),
                repr(float(mp.besselj(0, mx))),
                repr(float(mp.besselj(1, mx))),
                repr(float(mp.bessely(0, mx))),
                repr(float(mp.bessely(1, mx))),
            ]
            w.writerow(row)
    print(f"wrote {out} ({N_POINTS} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
