"""Deterministic cascade summation.

Used for every long reduction in the field-synthesis and indicator
kernels.  Terms are summed sequentially within blocks of 64; block sums
merge through a binary counter (each finished block combines with stack
levels the way binary addition carries).  The reduction tree therefore
depends only on the term count: results cannot depend on chunking or
worker count, and rounding error grows only logarithmically in the count.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def pairwise(buf, lo, hi):
    stack = np.empty(48)  # level i holds a sum of 64 * 2^i terms
    occupied = 0  # bitmask of live stack levels
    acc = 0.0
    count = 0
    for i in range(lo, hi):
        acc += buf[i]
        count += 1
        if count == 64:
            level = 0
            while occupied & (1 << level):
                acc = stack[level] + acc
                occupied &= ~(1 << level)
                level += 1
            stack[level] = acc
            occupied |= 1 << level
            acc = 0.0
            count = 0
    total = acc
    for level in range(48):
        if occupied & (1 << level):
            total = stack[level] + total
    return total
