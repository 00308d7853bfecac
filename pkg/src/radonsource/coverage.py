"""Cell-coverage helpers for the boundary-refined source quadrature.

For a raster cell that straddles a support boundary, the integral of a
constant-amplitude source over the covered part of the cell is
``amplitude * area`` with the kernel evaluated at the covered region's
centroid.  This module computes those areas and centroids:

* circles (disk boundaries, annulus rings, the analytic truncation edge)
  get near-exact area/centroid by integrating the chord length along x,
  split at the abscissas where the arc enters or leaves the cell, with
  24-point Gauss-Legendre on each smooth piece;
* arbitrary shapes fall back to dense midpoint subsampling of the
  indicator, which is plenty for the piecewise-constant pipeline sources.

All routines are deterministic (fixed node sets, no RNG).
"""

import math

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def classify_circle_rect(cx, cy, rho, x1, x2, y1, y2):
    """-1 if the rect is outside the disk, +1 if fully inside, 0 if straddling."""
    ax = max(x1 - cx, 0.0, cx - x2)
    ay = max(y1 - cy, 0.0, cy - y2)
    if ax * ax + ay * ay >= rho * rho:
        return -1
    bx = max(abs(x1 - cx), abs(x2 - cx))
    by = max(abs(y1 - cy), abs(y2 - cy))
    if bx * bx + by * by < rho * rho:
        return 1
    return 0


def circle_rect_coverage(cx, cy, rho, x1, x2, y1, y2):
    """Area and centroid of ``[x1,x2] x [y1,y2]`` intersected with the disk
    of radius rho about (cx, cy).

    Returns (area, centroid_x, centroid_y); centroid is (0, 0) when the
    intersection is empty.
    """
    cls = classify_circle_rect(cx, cy, rho, x1, x2, y1, y2)
    if cls == -1:
        return 0.0, 0.0, 0.0
    if cls == 1:
        return (x2 - x1) * (y2 - y1), 0.5 * (x1 + x2), 0.5 * (y1 + y2)

    # Shift so the circle is centered at the origin.
    a1, a2 = x1 - cx, x2 - cx
    b1, b2 = y1 - cy, y2 - cy
    lo, hi = max(a1, -rho), min(a2, rho)
    if hi <= lo:
        return 0.0, 0.0, 0.0

    breaks = {lo, hi}
    for b in (b1, b2):
        if abs(b) < rho:
            xb = math.sqrt(rho * rho - b * b)
            for cand in (-xb, xb):
                if lo < cand < hi:
                    breaks.add(cand)
    cuts = sorted(breaks)

    area = 0.0
    mx = 0.0
    my = 0.0
    for p, q in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (q - p)
        mid = 0.5 * (p + q)
        xg = mid + half * _GL_NODES
        g = np.sqrt(np.maximum(rho * rho - xg * xg, 0.0))
        yhi = np.minimum(b2, g)
        ylo = np.maximum(b1, -g)
        ln = np.maximum(yhi - ylo, 0.0)
        live = ln > 0.0
        area += half * float(np.sum(_GL_WEIGHTS * ln))
        mx += half * float(np.sum(_GL_WEIGHTS * xg * ln))
        my += half * float(np.sum(_GL_WEIGHTS * np.where(live, 0.5 * (yhi * yhi - ylo * ylo), 0.0)))
    if area <= 0.0:
        return 0.0, 0.0, 0.0
    return area, cx + mx / area, cy + my / area


def sampled_coverage(indicator, x1, x2, y1, y2, n_sub=32):
    """Area and centroid of the cell region where ``indicator`` holds,
    estimated from an n_sub x n_sub midpoint subsample.

    ``indicator`` maps an (N, 2) point array to a boolean array.
    """
    t = (np.arange(n_sub) + 0.5) / n_sub
    xs = x1 + (x2 - x1) * t
    ys = y1 + (y2 - y1) * t
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    ins = indicator(pts)
    n = int(np.count_nonzero(ins))
    if n == 0:
        return 0.0, 0.0, 0.0
    area = (x2 - x1) * (y2 - y1) * n / (n_sub * n_sub)
    return area, float(np.mean(pts[ins, 0])), float(np.mean(pts[ins, 1]))
