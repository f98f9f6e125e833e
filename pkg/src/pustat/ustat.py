"""Pathwise U-statistics and their Malliavin-type operators.

For a configuration eta and a symmetric kernel f of order k,

    F(eta) = sum of f over all ordered k-tuples of distinct points,

computed as k! times the sum over unordered index combinations.  The
difference (add-one-cost) operator D_z F = F(eta + delta_z) - F(eta) has an
incremental O(n^{k-1}) form: k! times the sum of f(z, subset) over unordered
(k-1)-subsets of existing points.  Iterating D gives the inclusion-exclusion
sum over 2^n augmented configurations.  Finally, -L^{-1}(F - EF) -- the
inverse Ornstein-Uhlenbeck generator applied to the centred statistic --
has the explicit pathwise representation

    sum_{m=1..k} (1/m) * [ U_m(eta) - integral of f dmu_t^k ],

where U_m is the order-m U-statistic whose kernel is the m-th marginal
integral of f (binomial factor excluded).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import _accel
from .kernels import MarginalIntegration, SymmetricKernel
from .measure import IntensitySpec, PointConfiguration

__all__ = [
    "UStatValue",
    "evaluate",
    "evaluate_abs",
    "add_one_cost",
    "add_one_costs",
    "iterated_difference",
    "inverse_ou_pathwise",
    "inverse_ou_add_one_costs",
]

_EVAL_CHUNK = 1 << 19  # tuples per batched kernel call
_MAX_ITERATED = 20  # inclusion-exclusion guard: 2^n terms


@dataclass(frozen=True)
class UStatValue:
    """Value of a U-statistic plus the number of ordered tuples visited."""

    value: float
    tuple_count: int


def _falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= max(n - i, 0)
    return out


def _pair_chunks(n: int, chunk: int) -> Iterator[np.ndarray]:
    """Unordered index pairs (i < j) from range(n), in blocks of rows."""
    i = 0
    while i < n - 1:
        rows = []
        total = 0
        while i < n - 1 and total < chunk:
            rows.append(i)
            total += n - 1 - i
            i += 1
        ii = np.repeat(np.array(rows, dtype=np.intp), [n - 1 - r for r in rows])
        jj = np.concatenate([np.arange(r + 1, n, dtype=np.intp) for r in rows])
        yield np.column_stack([ii, jj])


def _combo_chunks(n: int, k: int, chunk: int = _EVAL_CHUNK) -> Iterator[np.ndarray]:
    """Unordered index k-combinations from range(n) as (m, k) arrays."""
    if k == 0:
        yield np.empty((1, 0), dtype=np.intp)
        return
    if n < k:
        return
    if k == 1:
        idx = np.arange(n, dtype=np.intp)[:, None]
        for s in range(0, n, chunk):
            yield idx[s : s + chunk]
        return
    if k == 2:
        yield from _pair_chunks(n, chunk)
        return
    buf = []
    for combo in itertools.combinations(range(n), k):
        buf.append(combo)
        if len(buf) == chunk:
            yield np.array(buf, dtype=np.intp)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.intp)


def _sum_over_tuples(values_fn, points: np.ndarray, k: int) -> float:
    total = 0.0
    for idx in _combo_chunks(len(points), k):
        total += float(values_fn(points[idx]).sum())
    return math.factorial(k) * total


def evaluate(kernel: SymmetricKernel, config: PointConfiguration) -> UStatValue:
    """Sum of f over all ordered k-tuples of distinct configuration points."""
    n, k = len(config), kernel.order
    tc = _falling_factorial(n, k)
    if n < k:
        return UStatValue(0.0, tc)
    if kernel.pair_radius is not None and k == 2:
        pairs = _accel.count_pairs_within(config.points, kernel.pair_radius)
        return UStatValue(2.0 * pairs, tc)
    return UStatValue(_sum_over_tuples(kernel, config.points, k), tc)


def evaluate_abs(kernel: SymmetricKernel, config: PointConfiguration) -> UStatValue:
    """As evaluate, with |f| in place of f."""
    n, k = len(config), kernel.order
    tc = _falling_factorial(n, k)
    if n < k:
        return UStatValue(0.0, tc)
    if kernel.pair_radius is not None and k == 2:
        pairs = _accel.count_pairs_within(config.points, kernel.pair_radius)
        return UStatValue(2.0 * pairs, tc)
    return UStatValue(_sum_over_tuples(kernel.abs_values, config.points, k), tc)


def add_one_costs(
    kernel: SymmetricKernel,
    config: PointConfiguration,
    zs: np.ndarray,
    *,
    absolute: bool = False,
) -> np.ndarray:
    """D_z F = F(eta + delta_z) - F(eta) for each row z of zs.

    Incremental form: only tuples containing z are new, so the cost is
    k! * sum over unordered (k-1)-subsets of f(z, subset), an O(n^{k-1})
    computation instead of the O(n^k) difference of two full evaluations.
    """
    zs = np.atleast_2d(np.asarray(zs, dtype=float))
    n, k = len(config), kernel.order
    if kernel.pair_radius is not None and k == 2:
        counts = _accel.count_neighbors(config.points, zs, kernel.pair_radius)
        return 2.0 * counts.astype(float)
    if n < k - 1:
        return np.zeros(len(zs))
    fn = kernel.abs_values if absolute else kernel
    kfact = math.factorial(k)
    out = np.zeros(len(zs))
    for idx in _combo_chunks(n, k - 1):
        sub = config.points[idx]  # (c, k-1, d)
        c = len(sub)
        zchunk = max(1, _EVAL_CHUNK // max(c, 1))
        for s in range(0, len(zs), zchunk):
            zblock = zs[s : s + zchunk]
            m = len(zblock)
            left = np.repeat(zblock[:, None, :], c, axis=0).reshape(m * c, 1, -1)
            right = np.tile(sub, (m, 1, 1))
            vals = fn(np.concatenate([left, right], axis=1)).reshape(m, c)
            out[s : s + m] += vals.sum(axis=1)
    return kfact * out


def add_one_cost(kernel: SymmetricKernel, config: PointConfiguration, z) -> float:
    """D_z F at a single point z."""
    return float(add_one_costs(kernel, config, np.atleast_2d(z))[0])


def iterated_difference(kernel: SymmetricKernel, config: PointConfiguration, zs) -> float:
    """The n-fold difference D^n F at points zs, by inclusion-exclusion.

    Exact sum of (-1)^(n-|I|) F(eta + sum_{i in I} delta_{z_i}) over all
    2^n subsets I; refuses n > 20.
    """
    zs = np.atleast_2d(np.asarray(zs, dtype=float))
    n = len(zs)
    if n < 1:
        raise ValueError("need at least one difference point")
    if n > _MAX_ITERATED:
        raise ValueError(f"iterated difference limited to {_MAX_ITERATED} points")
    total = 0.0
    for mask in range(1 << n):
        chosen = [i for i in range(n) if (mask >> i) & 1]
        aug = config.with_points(zs[chosen]) if chosen else config
        sign = -1.0 if (n - len(chosen)) % 2 else 1.0
        total += sign * evaluate(kernel, aug).value
    return total


def inverse_ou_pathwise(
    kernel: SymmetricKernel,
    config: PointConfiguration,
    intensity: IntensitySpec,
    *,
    mc: Optional[MarginalIntegration] = None,
) -> float:
    """-L^{-1}(F - EF) at the configuration, via the marginal U-statistics.

    Requires marginals (analytic, or the Monte Carlo fallback).  The full
    integral of f against mu_t^k is cached per (kernel, intensity).

    With Monte Carlo marginals the centering constant is itself an
    estimate, so all returned values share a fixed offset of order
    1/sqrt(mc.samples) (deterministic given the fallback seed); it does not
    average out over replications.  Differences D_z of this quantity are
    free of that constant (see inverse_ou_add_one_costs).
    """
    k = kernel.order
    full = kernel.full_integral(intensity, mc=mc)
    points = config.points
    n = len(config)
    out = 0.0
    for m in range(1, k + 1):
        um = 0.0
        if n >= m:
            um = _sum_over_tuples(
                lambda x, _m=m: kernel.marginal(intensity, x, _m, mc=mc), points, m
            )
        out += (um - full) / m
    return out


def inverse_ou_add_one_costs(
    kernel: SymmetricKernel,
    config: PointConfiguration,
    intensity: IntensitySpec,
    zs: np.ndarray,
    *,
    mc: Optional[MarginalIntegration] = None,
) -> np.ndarray:
    """-D_z L^{-1}(F - EF) for each row z of zs.

    Add-one cost of the marginal U-statistics: the constant terms cancel,
    leaving sum_{m=1..k} (m-1)! * sum over (m-1)-subsets of
    marginal_m(z, subset).
    """
    zs = np.atleast_2d(np.asarray(zs, dtype=float))
    k = kernel.order
    n = len(config)
    points = config.points
    out = np.zeros(len(zs))
    for m in range(1, k + 1):
        if n < m - 1:
            continue
        # fast path: order-2 radius indicator, marginal_2 = f is a neighbor count
        if m == 2 and kernel.pair_radius is not None and k == 2:
            counts = _accel.count_neighbors(points, zs, kernel.pair_radius)
            out += counts.astype(float)
            continue
        if m == 1:
            vals = kernel.marginal(intensity, zs[:, None, :], 1, mc=mc)
            out += vals
            continue
        mm1_fact = math.factorial(m - 1)
        acc = np.zeros(len(zs))
        for idx in _combo_chunks(n, m - 1):
            sub = points[idx]  # (c, m-1, d)
            c = len(sub)
            zchunk = max(1, _EVAL_CHUNK // max(c, 1))
            for s in range(0, len(zs), zchunk):
                zblock = zs[s : s + zchunk]
                mz = len(zblock)
                left = np.repeat(zblock[:, None, :], c, axis=0).reshape(mz * c, 1, -1)
                right = np.tile(sub, (mz, 1, 1))
                args = np.concatenate([left, right], axis=1)
                vals = kernel.marginal(intensity, args, m, mc=mc).reshape(mz, c)
                acc[s : s + mz] += vals.sum(axis=1)
        out += mm1_fact * acc
    return out
