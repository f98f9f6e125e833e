"""Backend selection for the counting kernels.

Imports the compiled extension when present and falls back to the numpy
implementation otherwise (or when PUSTAT_FORCE_PY is set).  Both backends
produce identical counts, so results never depend on which one is active.
"""

import os

import numpy as np

_impl = None
if not os.environ.get("PUSTAT_FORCE_PY"):
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = None

if _impl is not None:
    BACKEND = "compiled"
else:
    from . import _core_py as _impl

    BACKEND = "python"


def count_pairs_within(points, r):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    return int(_impl.count_pairs_within(pts, float(r)))


def count_neighbors(points, queries, r):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    qs = np.ascontiguousarray(queries, dtype=np.float64)
    return np.asarray(_impl.count_neighbors(pts, qs, float(r)), dtype=np.int64)
