"""Symmetric U-statistic kernels with optional analytic marginal integrals.

A kernel of order k is a symmetric function f on box^k, evaluated in
batches: an (m, k, d) array of argument tuples maps to an (m,) array.
Alongside f we carry |f| and, where available, the partial integrals

    marginal_i(x_1..x_i) = integral of f(x_1..x_i, y_1..y_{k-i}) dmu_t^{k-i}

supplied WITHOUT the binomial factor C(k, i); the chaos layer applies it.
Kernels lacking an analytic marginal fall back to Monte Carlo with common
random numbers across probe points (see MarginalIntegration).

Built-ins:
    count                  k=1, f == 1
    constant(c, k)         f == c
    geometric_indicator(r) k=2, f(x, y) = 1(|x - y| <= r), analytic
                           marginals on 1-D boxes with unit density
    product(g, k)          f = prod_j g(x_j)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .measure import IntensitySpec, sample_points

__all__ = [
    "SymmetricKernel",
    "MarginalIntegration",
    "MarginalUnavailable",
    "make_kernel",
    "make_count",
    "make_constant",
    "make_geometric_indicator",
    "make_product",
    "symmetry_check",
    "kernel_descriptor",
]


class MarginalUnavailable(Exception):
    """Raised by an analytic marginal that does not cover the given intensity."""


@dataclass(frozen=True)
class MarginalIntegration:
    """Monte Carlo settings for marginal integrals without analytic forms.

    The y-draws are seeded deterministically (common random numbers across
    probe points), so fallback marginals are pure functions of their inputs.
    """

    samples: int = 20_000
    seed: int = 0x9A7C


@dataclass(frozen=True, eq=False)
class SymmetricKernel:
    """Order-k symmetric kernel with batched evaluation.

    ``pair_radius`` is set for the distance indicator and routes the order-2
    hot paths through the compiled counting backend.
    """

    name: str
    order: int
    eval_fn: Callable[[np.ndarray], np.ndarray]
    abs_eval_fn: Callable[[np.ndarray], np.ndarray]
    marginal_fn: Optional[Callable] = None
    abs_marginal_fn: Optional[Callable] = None
    pair_radius: Optional[float] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("kernel order k must be >= 1")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.eval_fn(x), dtype=float).reshape(len(x))

    def abs_values(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.abs_eval_fn(x), dtype=float).reshape(len(x))

    @property
    def has_marginals(self) -> bool:
        return self.marginal_fn is not None

    def marginal_with_stderr(
        self,
        intensity: IntensitySpec,
        x: np.ndarray,
        i: int,
        *,
        absolute: bool = False,
        mc: Optional[MarginalIntegration] = None,
    ):
        """Values (and standard errors) of the i-th marginal at (m, i, d) probes.

        i = order returns f itself, i = 0 the full integral.  Analytic
        marginals carry stderr 0; the Monte Carlo fallback shares its
        y-draws across all probe rows.
        """
        if not 0 <= i <= self.order:
            raise ValueError(f"marginal index {i} outside 0..{self.order}")
        x = np.asarray(x, dtype=float)
        if x.ndim != 3 or x.shape[1] != i:
            raise ValueError(f"probe array must have shape (m, {i}, d)")
        if i == self.order:
            vals = self.abs_values(x) if absolute else self(x)
            return vals, np.zeros(len(x))
        fn = self.abs_marginal_fn if absolute else self.marginal_fn
        if fn is not None:
            try:
                vals = np.asarray(fn(intensity, x, i), dtype=float).reshape(len(x))
                return vals, np.zeros(len(x))
            except MarginalUnavailable:
                pass
        return _marginal_mc(self, intensity, x, i, absolute, mc or MarginalIntegration())

    def marginal(self, intensity, x, i, *, absolute=False, mc=None) -> np.ndarray:
        return self.marginal_with_stderr(intensity, x, i, absolute=absolute, mc=mc)[0]

    def full_integral(
        self, intensity: IntensitySpec, *, absolute: bool = False, mc=None
    ) -> float:
        """Integral of f (or |f|) against mu_t^k, cached per intensity."""
        key = (id(self), absolute)
        cache = intensity._integral_cache
        if key not in cache:
            x0 = np.empty((1, 0, intensity.dim))
            cache[key] = float(self.marginal(intensity, x0, 0, absolute=absolute, mc=mc)[0])
        return cache[key]


def _marginal_mc(kernel, intensity, x, i, absolute, mc):
    """Monte Carlo marginal: average f(x, Y) over shared draws Y ~ mu_t/mass."""
    extra = kernel.order - i
    rng = np.random.default_rng(np.random.SeedSequence(mc.seed, spawn_key=(i,)))
    y = sample_points(intensity, mc.samples * extra, rng).reshape(mc.samples, extra, -1)
    scale = intensity.total_mass**extra
    m = len(x)
    vals = np.empty(m)
    ses = np.empty(m)
    fn = kernel.abs_values if absolute else kernel
    chunk = max(1, 2_000_000 // (mc.samples * kernel.order))
    for s in range(0, m, chunk):
        xs = x[s : s + chunk]  # (c, i, d)
        c = len(xs)
        left = np.repeat(xs, mc.samples, axis=0)  # (c*samples, i, d)
        right = np.tile(y, (c, 1, 1))  # (c*samples, extra, d)
        fv = fn(np.concatenate([left, right], axis=1)).reshape(c, mc.samples)
        vals[s : s + c] = fv.mean(axis=1) * scale
        ses[s : s + c] = fv.std(axis=1, ddof=1) / math.sqrt(mc.samples) * scale
    return vals, ses


# ---------------------------------------------------------------------------
# built-in kernels
# ---------------------------------------------------------------------------


def _require_unit_density_1d(intensity: IntensitySpec):
    if intensity.dim != 1 or intensity.density is not None:
        raise MarginalUnavailable(
            "analytic marginals cover 1-D boxes with unit density only"
        )


def make_count() -> SymmetricKernel:
    """Order-1 kernel f == 1; the U-statistic is the point count."""

    def _eval(x):
        return np.ones(len(x))

    def _marg(intensity, x, i):
        # i == 0: integral of 1 against mu_t
        return np.full(len(x), intensity.total_mass)

    return SymmetricKernel(
        name="count",
        order=1,
        eval_fn=_eval,
        abs_eval_fn=_eval,
        marginal_fn=_marg,
        abs_marginal_fn=_marg,
        params={},
    )


def make_constant(c: float, k: int) -> SymmetricKernel:
    """Order-k constant kernel f == c."""
    if k < 1:
        raise ValueError("kernel order k must be >= 1")
    c = float(c)

    def _eval(x):
        return np.full(len(x), c)

    def _abs_eval(x):
        return np.full(len(x), abs(c))

    def _marg(intensity, x, i):
        return np.full(len(x), c * intensity.total_mass ** (k - i))

    def _abs_marg(intensity, x, i):
        return np.full(len(x), abs(c) * intensity.total_mass ** (k - i))

    return SymmetricKernel(
        name="constant",
        order=k,
        eval_fn=_eval,
        abs_eval_fn=_abs_eval,
        marginal_fn=_marg,
        abs_marginal_fn=_abs_marg,
        params={"c": c, "k": k},
    )


def make_geometric_indicator(r: float) -> SymmetricKernel:
    """Order-2 kernel f(x, y) = 1(|x - y| <= r): pair counts within radius r."""
    if r <= 0:
        raise ValueError("radius r must be positive")
    r = float(r)
    r2 = r * r

    def _eval(x):
        d2 = ((x[:, 0, :] - x[:, 1, :]) ** 2).sum(axis=1)
        return (d2 <= r2).astype(float)

    def _marg(intensity, x, i):
        _require_unit_density_1d(intensity)
        lo, hi = intensity.box[0]
        t = intensity.t
        if i == 0:
            length = hi - lo
            rr = min(r, length)
            return np.full(len(x), t * t * (2.0 * rr * length - rr * rr))
        xs = x[:, 0, 0]
        seg = np.minimum(xs + r, hi) - np.maximum(xs - r, lo)
        return t * np.clip(seg, 0.0, None)

    return SymmetricKernel(
        name="geometric_indicator",
        order=2,
        eval_fn=_eval,
        abs_eval_fn=_eval,
        marginal_fn=_marg,
        abs_marginal_fn=_marg,
        pair_radius=r,
        params={"r": r},
    )


def make_product(
    g: Callable[[np.ndarray], np.ndarray],
    k: int,
    *,
    g_abs: Optional[Callable] = None,
    base_integral: Optional[float] = None,
    abs_base_integral: Optional[float] = None,
    name: str = "product",
) -> SymmetricKernel:
    """Order-k product kernel f(x_1..x_k) = prod_j g(x_j).

    ``g`` maps (m, d) points to (m,) values.  Supplying base_integral (the
    Lebesgue integral of g over the box) enables analytic marginals on
    constant-density intensities; otherwise all marginals fall back to
    Monte Carlo.
    """
    if k < 1:
        raise ValueError("kernel order k must be >= 1")
    g_abs = g_abs or (lambda pts: np.abs(g(pts)))

    def _eval(x):
        vals = np.ones(len(x))
        for col in range(k):
            vals = vals * np.asarray(g(x[:, col, :]), dtype=float)
        return vals

    def _abs_eval(x):
        vals = np.ones(len(x))
        for col in range(k):
            vals = vals * np.asarray(g_abs(x[:, col, :]), dtype=float)
        return vals

    def _make_marg(point_fn, base):
        def _marg(intensity, x, i):
            if base is None or intensity.density is not None:
                raise MarginalUnavailable("product marginals need a base integral")
            factor = (intensity.t * base) ** (k - i)
            vals = np.full(len(x), factor)
            for col in range(i):
                vals = vals * np.asarray(point_fn(x[:, col, :]), dtype=float)
            return vals

        return _marg

    return SymmetricKernel(
        name=name,
        order=k,
        eval_fn=_eval,
        abs_eval_fn=_abs_eval,
        marginal_fn=_make_marg(g, base_integral),
        abs_marginal_fn=_make_marg(g_abs, abs_base_integral),
        params={"k": k},
    )


_BUILTIN_NAMES = ("count", "constant", "geometric_indicator")


def make_kernel(spec) -> SymmetricKernel:
    """Build a kernel from a descriptor: a name or a {"name": ..., params} map.

    Descriptors cover the serializable built-ins; ``product`` and custom
    kernels are constructed programmatically via their factories.
    """
    if isinstance(spec, SymmetricKernel):
        return spec
    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, dict) or "name" not in spec:
        raise ValueError("kernel descriptor must be a name or a dict with a 'name'")
    name = spec["name"]
    params = {key: val for key, val in spec.items() if key != "name"}
    if name == "count":
        return make_count()
    if name == "constant":
        return make_constant(params.get("c", 1.0), params.get("k", 1))
    if name == "geometric_indicator":
        if "r" not in params:
            raise ValueError("geometric_indicator descriptor requires 'r'")
        return make_geometric_indicator(params["r"])
    raise ValueError(f"unknown kernel '{name}' (built-ins: {', '.join(_BUILTIN_NAMES)})")


def kernel_descriptor(kernel: SymmetricKernel) -> dict:
    """Serializable descriptor (name + parameter map) of a built-in kernel."""
    return {"name": kernel.name, **kernel.params}


def scale_kernel(kernel: SymmetricKernel, c: float) -> SymmetricKernel:
    """The kernel c*f, with marginals scaled accordingly."""
    c = float(c)
    ac = abs(c)

    def _wrap(fn, factor):
        if fn is None:
            return None
        return lambda *args: factor * fn(*args)

    return replace(
        kernel,
        name=f"{kernel.name}*{c:g}",
        eval_fn=_wrap(kernel.eval_fn, c),
        abs_eval_fn=_wrap(kernel.abs_eval_fn, ac),
        marginal_fn=_wrap(kernel.marginal_fn, c),
        abs_marginal_fn=_wrap(kernel.abs_marginal_fn, ac),
        pair_radius=None,
        params={**kernel.params, "scale": c},
    )


def symmetry_check(
    kernel: SymmetricKernel,
    trials: int = 64,
    rng: Optional[np.random.Generator] = None,
    dim: int = 1,
    rtol: float = 1e-12,
) -> bool:
    """True iff f agrees under random argument permutations on random probes."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    k = kernel.order
    if k == 1:
        return True
    x = rng.random((trials, k, dim))
    base = kernel(x)
    for _ in range(3):
        perm = rng.permutation(k)
        diff = np.abs(kernel(x[:, perm, :]) - base)
        if np.any(diff > rtol * np.maximum(1.0, np.abs(base))):
            return False
    return True
