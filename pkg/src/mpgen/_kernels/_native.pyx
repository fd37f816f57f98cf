# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (see _kernels/__init__.py)."""

from libc.stdlib cimport free, malloc


def smoothed_fill(double[::1] out, long long[::1] ids, double[::1] counts,
                  double alpha, double denom):
    cdef Py_ssize_t i
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t m = ids.shape[0]
    cdef double base = alpha / denom
    for i in range(n):
        out[i] = base
    for i in range(m):
        out[ids[i]] = (alpha + counts[i]) / denom


def levenshtein(int[::1] a, int[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    cdef Py_ssize_t i, j
    cdef int cost, best, cand
    cdef int *prev = <int *> malloc((m + 1) * sizeof(int))
    cdef int *cur = <int *> malloc((m + 1) * sizeof(int))
    cdef int *tmp
    if prev == NULL or cur == NULL:
        if prev != NULL:
            free(prev)
        if cur != NULL:
            free(cur)
        raise MemoryError()
    try:
        for j in range(m + 1):
            prev[j] = <int> j
        for i in range(1, n + 1):
            cur[0] = <int> i
            for j in range(1, m + 1):
                cost = 0 if a[i - 1] == b[j - 1] else 1
                best = prev[j] + 1
                cand = cur[j - 1] + 1
                if cand < best:
                    best = cand
                cand = prev[j - 1] + cost
                if cand < best:
                    best = cand
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        return prev[m]
    finally:
        free(prev)
        free(cur)
