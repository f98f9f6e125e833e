import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pustat.distance import empirical_dK, empirical_dW, poisson_exact_dK

from oracles import poisson_dk_mpmath, wasserstein_riemann

finite_floats = st.floats(min_value=-6.0, max_value=6.0, allow_nan=False)


def test_dk_point_mass_at_zero():
    assert empirical_dK([0.0]) == 0.5


def test_dk_at_normal_quantiles():
    # samples at Phi-quantiles of (i - 0.5)/n leave a gap of exactly 0.5/n
    from scipy.special import ndtri

    n = 40
    samples = ndtri((np.arange(1, n + 1) - 0.5) / n)
    assert empirical_dK(samples) == pytest.approx(0.5 / n, rel=1e-9)


def test_dk_permutation_invariant(rng):
    x = rng.normal(size=200)
    assert empirical_dK(x) == empirical_dK(x[rng.permutation(200)])


def test_dk_range_and_empty():
    with pytest.raises(ValueError):
        empirical_dK([])
    assert 0.0 <= empirical_dK([3.0, -1.0]) <= 1.0


def test_dk_smoke_against_normal_samples():
    # seed-pinned: for 10^4 genuinely normal draws dK < 1.95/sqrt(n)
    x = np.random.default_rng(2024).normal(size=10_000)
    assert empirical_dK(x) < 1.95 / math.sqrt(10_000)


def test_dw_point_mass_at_zero():
    # W1(delta_0, N) = E|N| = sqrt(2/pi)
    assert empirical_dW([0.0]) == pytest.approx(math.sqrt(2.0 / math.pi), abs=1e-12)


def test_dw_translation_lipschitz(rng):
    x = rng.normal(size=300)
    base = empirical_dW(x)
    for c in (-0.7, 0.3, 2.0):
        assert abs(empirical_dW(x + c) - base) <= abs(c) + 1e-9


def test_dw_matches_riemann_oracle(rng):
    for n in (1, 2, 17, 400):
        x = rng.normal(size=n) * 1.3 + 0.2
        assert abs(empirical_dW(x) - wasserstein_riemann(x)) <= 1e-6


def test_dw_with_ties():
    x = np.array([0.5, 0.5, -0.5, -0.5])
    assert abs(empirical_dW(x) - wasserstein_riemann(x)) <= 1e-6


@settings(max_examples=200, deadline=None)
@given(st.lists(finite_floats, min_size=1, max_size=60))
def test_dk_le_two_sqrt_dw(samples):
    # the Gaussian-comparison inequality between the two distances
    dk = empirical_dK(samples)
    dw = empirical_dW(samples)
    assert dk <= 2.0 * math.sqrt(dw) + 1e-12


def test_poisson_dk_rejects_nonpositive():
    with pytest.raises(ValueError):
        poisson_exact_dK(0.0)


def test_poisson_dk_against_high_precision_oracle():
    for t in (1.0, 4.0, 25.0):
        assert abs(poisson_exact_dK(t) - poisson_dk_mpmath(t)) <= 1e-12


def test_poisson_dk_t1_brute_force_window():
    # at t=1 the sup is certainly inside m = 0..40
    assert poisson_exact_dK(1.0) == pytest.approx(poisson_dk_mpmath(1.0, m_max=40), abs=1e-12)


def test_poisson_dk_positive_and_bounded():
    for t in (0.5, 1.0, 4.0, 25.0, 100.0):
        dk = poisson_exact_dK(t)
        assert 0.0 < dk < 1.0
        if t >= 1.0:
            assert dk <= 8.0 / math.sqrt(t)


def test_poisson_dk_rate_stabilizes():
    # sqrt(t) * dK along dyadic t: successive ratios settle in [0.8, 1.25]
    values = [math.sqrt(t) * poisson_exact_dK(float(t)) for t in (64, 128, 256, 512, 1024)]
    for a, b in zip(values, values[1:]):
        assert 0.8 <= b / a <= 1.25
    assert all(0.0 < v <= 8.0 for v in values)
