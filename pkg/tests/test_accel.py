import numpy as np
import pytest

from pustat import _accel, _core_py


def _compiled_or_skip():
    if _accel.BACKEND != "compiled":
        pytest.skip("compiled extension not built")
    from pustat import _core

    return _core


def test_backends_agree_on_pair_counts(rng):
    core = _compiled_or_skip()
    for n in (0, 1, 2, 7, 50, 400):
        for d in (1, 2, 3):
            pts = np.ascontiguousarray(rng.random((n, d)))
            r = float(rng.uniform(0.05, 0.5))
            assert core.count_pairs_within(pts, r) == _core_py.count_pairs_within(pts, r)


def test_backends_agree_on_neighbor_counts(rng):
    core = _compiled_or_skip()
    for n, m in ((0, 4), (5, 0), (30, 17), (200, 64)):
        pts = np.ascontiguousarray(rng.random((n, 2)))
        qs = np.ascontiguousarray(rng.random((m, 2)))
        a = np.asarray(core.count_neighbors(pts, qs, 0.2))
        b = _core_py.count_neighbors(pts, qs, 0.2)
        assert np.array_equal(a, b)


def test_pair_count_known_values():
    pts = np.array([[0.0], [0.05], [0.5]])
    assert _accel.count_pairs_within(pts, 0.1) == 1
    assert _accel.count_pairs_within(pts, 0.5) == 3
    assert _accel.count_pairs_within(np.zeros((4, 2)), 0.01) == 6  # coincident points


def test_neighbor_count_known_values():
    pts = np.array([[0.0], [0.2], [0.9]])
    out = _accel.count_neighbors(pts, np.array([[0.1], [0.85]]), 0.15)
    assert out.tolist() == [2, 1]


def test_chunked_fallback_matches_direct(rng):
    # force chunking in the numpy fallback
    import pustat._core_py as mod

    pts = np.ascontiguousarray(rng.random((500, 2)))
    qs = np.ascontiguousarray(rng.random((300, 2)))
    old = mod._CHUNK
    try:
        mod._CHUNK = 1000
        small_pairs = mod.count_pairs_within(pts, 0.1)
        small_nb = mod.count_neighbors(pts, qs, 0.1)
    finally:
        mod._CHUNK = old
    assert small_pairs == mod.count_pairs_within(pts, 0.1)
    assert np.array_equal(small_nb, mod.count_neighbors(pts, qs, 0.1))