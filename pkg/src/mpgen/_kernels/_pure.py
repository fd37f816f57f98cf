"""Pure-Python/numpy implementations of the hot kernels.

Arithmetic mirrors the compiled backend operation-for-operation so both
produce bitwise-identical results.
"""

from __future__ import annotations

import numpy as np


def smoothed_fill(out, ids, counts, alpha, denom):
    out[:] = alpha / denom
    if len(ids):
        out[ids] = (alpha + counts) / denom


def levenshtein(a, b) -> int:
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    cur = [0] * (m + 1)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev, cur = cur, prev
    return prev[m]
