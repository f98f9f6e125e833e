# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels for the radius-indicator U-statistic paths.

These are the innermost loops of the pathwise experiments: counting point
pairs within a distance threshold (the order-2 indicator U-statistic) and
counting neighbours of query points (its add-one cost).  Both use squared
distances against r*r so results are bit-identical to the numpy fallback.
"""

import numpy as np


def count_pairs_within(double[:, ::1] pts, double r):
    """Number of unordered point pairs at Euclidean distance <= r."""
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef double r2 = r * r
    cdef Py_ssize_t i, j, c
    cdef double s, diff
    cdef long long total = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for c in range(d):
                diff = pts[i, c] - pts[j, c]
                s += diff * diff
            if s <= r2:
                total += 1
    return total


def count_neighbors(double[:, ::1] pts, double[:, ::1] queries, double r):
    """For each query point, the number of points within distance r."""
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef Py_ssize_t m = queries.shape[0]
    cdef double r2 = r * r
    out = np.zeros(m, dtype=np.int64)
    cdef long long[::1] out_v = out
    cdef Py_ssize_t i, q, c
    cdef double s, diff
    for q in range(m):
        for i in range(n):
            s = 0.0
            for c in range(d):
                diff = pts[i, c] - queries[q, c]
                s += diff * diff
            if s <= r2:
                out_v[q] += 1
    return out
