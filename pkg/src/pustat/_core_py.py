"""Pure-numpy fallback for the compiled counting kernels.

Mirrors pustat._core exactly (same squared-distance comparison), with row
chunking to bound the size of the broadcast temporaries.
"""

import numpy as np

_CHUNK = 2_000_000  # pair evaluations per broadcast block


def count_pairs_within(pts, r):
    """Number of unordered point pairs at Euclidean distance <= r."""
    n = pts.shape[0]
    if n < 2:
        return 0
    r2 = r * r
    rows = max(1, _CHUNK // n)
    hits = 0
    for start in range(0, n, rows):
        block = pts[start : start + rows]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        hits += int((d2 <= r2).sum())
    # the full n x n scan counts the diagonal once and each pair twice
    return (hits - n) // 2


def count_neighbors(pts, queries, r):
    """For each query point, the number of points within distance r."""
    m = queries.shape[0]
    out = np.zeros(m, dtype=np.int64)
    if pts.shape[0] == 0 or m == 0:
        return out
    r2 = r * r
    rows = max(1, _CHUNK // pts.shape[0])
    for start in range(0, m, rows):
        block = queries[start : start + rows]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        out[start : start + rows] = (d2 <= r2).sum(axis=1)
    return out
