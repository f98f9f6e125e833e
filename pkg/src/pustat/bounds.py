"""Bound certificates for the Gaussian approximation of Poisson U-statistics.

The computable core is the family of partition-indexed integrals

    M_ij = sum over valid partitions p of the contracted product
           integral of (fbar_i x fbar_i x fbar_j x fbar_j)_p dmu_t^{|p|},

where fbar_i are the chaos kernels of the absolute-kernel statistic and the
contraction replaces all variables sharing a block of p by one integration
variable.  From these and Var F:

    dK <= 19 k^5     * sum_{i,j}    sqrt(M_ij) / Var F,
    dW <=  2 k^{7/2} * sum_{i<=j}   sqrt(M_ij) / Var F,
    E (F - EF)^4 <= k^2 sum_{i,j} M_ij + 3 k^2 (Var F)^2.

The module also estimates, by replication, the variance-type quantities
R_ij (order <= 2) that the partition integrals dominate, and the
Malliavin--Stein inner-product terms of the general Kolmogorov bound for
the standardized statistic G = (F - EF)/sqrt(Var F):

    T1 = E|1 - <DG, -DL^{-1}G>|,   T2 = E<(DG)^2, (DL^{-1}G)^2>,

the companion moments entering c(F), and a grid maximum (a lower estimate)
of sup_s E<D 1(G > s), DG |DL^{-1}G|>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .chaos import MCValue, chaos_kernel_values, variance_from_kernels
from .kernels import MarginalIntegration, SymmetricKernel, kernel_descriptor
from .measure import IntensitySpec, mc_integral, sample_point_process, sample_points
from .partitions import enumerate_partitions, variables
from .ustat import add_one_costs, evaluate, inverse_ou_add_one_costs

__all__ = [
    "compute_Mij",
    "dk_bound",
    "dw_bound",
    "fourth_moment_bound",
    "estimate_Rij",
    "estimate_stein_terms",
    "SteinTerms",
    "BoundValue",
    "BoundReport",
    "bound_report",
    "UNRELIABLE_RATIO",
]

_M_SEED = 0xB0D5
UNRELIABLE_RATIO = 0.5  # stderr/estimate above this flags a divergent integral
_SUP_NOTE = "grid maximum over s; a lower estimate of the supremum"


def _check_order(k: int):
    if k > 4:
        raise ValueError("bound machinery is capped at kernel order 4")


def compute_Mij(
    kernel: SymmetricKernel,
    intensity: IntensitySpec,
    i: int,
    j: int,
    *,
    samples: int = 200_000,
    rng: Optional[np.random.Generator] = None,
    mc: Optional[MarginalIntegration] = None,
) -> MCValue:
    """Monte Carlo value of M_ij: one plain-MC integral per partition.

    Each partition contributes an integral over box^{number of blocks}; the
    integrand evaluates one absolute chaos kernel per variable group at the
    block-shared coordinates and multiplies the four factors.  Standard
    errors combine in quadrature.
    """
    k = kernel.order
    _check_order(k)
    if not (1 <= i <= k and 1 <= j <= k):
        raise ValueError(f"indices ({i}, {j}) outside 1..{k}")
    rng = (
        rng
        if rng is not None
        else np.random.default_rng(np.random.SeedSequence(_M_SEED, spawn_key=(i, j)))
    )
    mc = mc or MarginalIntegration()
    vars_ = variables(i, j)
    sizes = (i, i, j, j)
    total = 0.0
    var_acc = 0.0
    for part in enumerate_partitions(i, j):
        dim = part.num_blocks
        if dim > 8:
            raise ValueError("integration dimension above 8")
        lbl = part.labels()
        labels = np.array([lbl[v] for v in vars_], dtype=np.intp)

        def integrand(w, labels=labels):
            vals = np.ones(len(w))
            pos = 0
            for a, size in enumerate(sizes):
                idx = labels[pos : pos + size]
                pos += size
                # independent fallback draws per factor keep the product unbiased
                mc_a = replace(mc, seed=mc.seed + 7919 * (a + 1))
                fv, _ = chaos_kernel_values(
                    kernel, intensity, size, w[:, idx, :], absolute=True, mc=mc_a
                )
                vals = vals * fv
            return vals

        est, se = mc_integral(integrand, intensity, dim, samples, rng)
        if not math.isfinite(est):
            raise ValueError(f"non-finite partition integral for M_{i}{j}")
        total += est
        var_acc += se * se
    return MCValue(total, math.sqrt(var_acc))


class BoundValue(NamedTuple):
    """A bound with propagated stderr; effective clips at 1 (a distance
    between laws never exceeds one)."""

    value: float
    stderr: float
    effective: float


def _root_sum(entries: List[MCValue]) -> Tuple[float, float]:
    """sum of sqrt(M) with delta-method variance of the sum."""
    total = 0.0
    var_acc = 0.0
    for mv in entries:
        total += math.sqrt(max(mv.value, 0.0))
        if mv.stderr > 0.0:
            denom = 2.0 * math.sqrt(max(mv.value, mv.stderr))
            var_acc += (mv.stderr / denom) ** 2
    return total, var_acc


def _scaled_bound(const: float, entries: List[MCValue], var_f: MCValue) -> BoundValue:
    if var_f.value <= 0.0:
        raise ValueError("Var F must be positive")
    root_total, root_var = _root_sum(entries)
    value = const * root_total / var_f.value
    se = math.sqrt(
        (const / var_f.value) ** 2 * root_var + (value * var_f.stderr / var_f.value) ** 2
    )
    return BoundValue(value, se, min(value, 1.0))


def dk_bound(m_matrix: List[List[MCValue]], var_f: MCValue, k: int) -> BoundValue:
    """Kolmogorov bound 19 k^5 sum_{i,j} sqrt(M_ij) / Var F (full double sum)."""
    entries = [m_matrix[i][j] for i in range(k) for j in range(k)]
    return _scaled_bound(19.0 * k**5, entries, var_f)


def dw_bound(m_matrix: List[List[MCValue]], var_f: MCValue, k: int) -> BoundValue:
    """Wasserstein bound 2 k^{7/2} sum_{i<=j} sqrt(M_ij) / Var F (triangular sum)."""
    entries = [m_matrix[i][j] for i in range(k) for j in range(i, k)]
    return _scaled_bound(2.0 * k**3.5, entries, var_f)


def fourth_moment_bound(m_matrix: List[List[MCValue]], var_f: MCValue, k: int) -> MCValue:
    """k^2 sum_{i,j} M_ij + 3 k^2 (Var F)^2 bounds the centred fourth moment."""
    value = 0.0
    var_acc = 0.0
    for i in range(k):
        for j in range(k):
            value += k * k * m_matrix[i][j].value
            var_acc += (k * k * m_matrix[i][j].stderr) ** 2
    value += 3.0 * k * k * var_f.value**2
    var_acc += (6.0 * k * k * var_f.value * var_f.stderr) ** 2
    return MCValue(value, math.sqrt(var_acc))


def _variance_with_stderr(a: np.ndarray) -> MCValue:
    """Sample variance with its moment-based standard error."""
    n = len(a)
    s2 = float(a.var(ddof=1))
    centred = a - a.mean()
    m4 = float(np.mean(centred**4))
    var_of_s2 = (m4 - s2 * s2 * (n - 3) / (n - 1)) / n
    return MCValue(s2, math.sqrt(max(var_of_s2, 0.0)))


def _mean_with_stderr(a: np.ndarray) -> MCValue:
    return MCValue(float(a.mean()), float(a.std(ddof=1)) / math.sqrt(len(a)))


def estimate_Rij(
    kernel: SymmetricKernel,
    intensity: IntensitySpec,
    i: int,
    j: int,
    *,
    reps: int = 2000,
    z_samples: int = 256,
    rng: np.random.Generator,
) -> MCValue:
    """Replication estimate of R_ij, the variance across realizations of

        integral over z of I_{i-1}(f_i(z, .)) I_{j-1}(f_j(z, .)) dmu_t.

    Supported for kernel order <= 2, where the inner factors are the
    deterministic f_1(z) and the pathwise first-order integral of the
    z-section of f_2.  The z-integral uses one shared set of draws across
    replications, so a deterministic integrand yields exactly zero.
    """
    k = kernel.order
    if k > 2:
        raise ValueError("R_ij estimation is supported for kernel order <= 2 only")
    if not (1 <= i <= k and 1 <= j <= k):
        raise ValueError(f"indices ({i}, {j}) outside 1..{k}")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    mass = intensity.total_mass
    z = sample_points(intensity, z_samples, rng)
    static_f1 = None
    section_integral = None
    if 1 in (i, j):
        static_f1, _ = chaos_kernel_values(kernel, intensity, 1, z[:, None, :])
    if 2 in (i, j):
        # z-section of f_2 = f integrates to the plain first marginal
        section_integral = kernel.marginal(intensity, z[:, None, :], 1)

    a_vals = np.empty(reps)
    for rep in range(reps):
        eta = sample_point_process(intensity, rng)
        i1_vals = None
        if 2 in (i, j):
            # sum_x f(z, x) is half the order-2 add-one cost
            i1_vals = add_one_costs(kernel, eta, z) / 2.0 - section_integral
        factor_i = static_f1 if i == 1 else i1_vals
        factor_j = static_f1 if j == 1 else i1_vals
        a_vals[rep] = mass * float(np.mean(factor_i * factor_j))
    return _variance_with_stderr(a_vals)


@dataclass
class SteinTerms:
    """Replication estimates of the Malliavin--Stein inner-product terms for
    the standardized statistic."""

    t1: MCValue  # E|1 - <DG, -DL^{-1}G>|
    t2: MCValue  # E<(DG)^2, (DL^{-1}G)^2>
    dg2_dg2: MCValue  # E<(DG)^2, (DG)^2>
    dgdg_sq: MCValue  # E<DG, DG>^2
    g4: MCValue  # E G^4
    c_f: MCValue
    sup_term: MCValue
    sup_argmax: float
    var_f: MCValue
    # integration by parts gives E<DG, -DL^{-1}G> = E G^2 = 1; a drift away
    # from 1 signals bias in the operator estimates
    inner_mean: MCValue = MCValue(math.nan, math.nan)
    note: str = _SUP_NOTE


def estimate_stein_terms(
    kernel: SymmetricKernel,
    intensity: IntensitySpec,
    *,
    reps: int = 2000,
    z_samples: int = 128,
    s_grid: Optional[np.ndarray] = None,
    rng: np.random.Generator,
    var_f: Optional[MCValue] = None,
    mc: Optional[MarginalIntegration] = None,
) -> SteinTerms:
    """Estimate the Kolmogorov-bound terms for G = (F - EF)/sqrt(Var F).

    Per replication, D_z G comes from the add-one cost and -D_z L^{-1} G
    from the add-one cost of the inverse-generator representation; inner
    products in L^2(mu_t) are Monte Carlo averages over z drawn from
    mu_t/mass, scaled by the mass.  The sup term is reported as a grid
    maximum and labeled a lower estimate.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if var_f is None:
        vr = variance_from_kernels(kernel, intensity, rng=rng.spawn(1)[0], mc=mc)
        var_f = MCValue(vr.variance, vr.stderr)
    if var_f.value <= 0.0:
        raise ValueError("Var F estimate must be positive")
    sigma = math.sqrt(var_f.value)
    ef = kernel.full_integral(intensity, mc=mc)
    mass = intensity.total_mass
    grid = np.linspace(-4.0, 4.0, 41) if s_grid is None else np.asarray(s_grid, dtype=float)

    ip1 = np.empty(reps)
    q2 = np.empty(reps)
    dg4 = np.empty(reps)
    ipdg = np.empty(reps)
    g4 = np.empty(reps)
    sup_mat = np.empty((reps, len(grid)))
    for rep in range(reps):
        eta = sample_point_process(intensity, rng)
        z = sample_points(intensity, z_samples, rng)
        dg = add_one_costs(kernel, eta, z) / sigma
        mdl = inverse_ou_add_one_costs(kernel, eta, intensity, z, mc=mc) / sigma
        gv = (evaluate(kernel, eta).value - ef) / sigma
        ip1[rep] = mass * float(np.mean(dg * mdl))
        q2[rep] = mass * float(np.mean(dg * dg * mdl * mdl))
        dg4[rep] = mass * float(np.mean(dg**4))
        ipdg[rep] = (mass * float(np.mean(dg * dg))) ** 2
        g4[rep] = gv**4
        jump = ((gv + dg)[:, None] > grid[None, :]).astype(float) - (gv > grid)[None, :]
        w = dg * np.abs(mdl)
        sup_mat[rep] = mass * (jump * w[:, None]).mean(axis=0)

    t1 = _mean_with_stderr(np.abs(1.0 - ip1))
    t2 = _mean_with_stderr(q2)
    a = _mean_with_stderr(dg4)
    b = _mean_with_stderr(ipdg)
    c = _mean_with_stderr(g4)
    c_f = _cf_value(a, b, c)
    col_means = sup_mat.mean(axis=0)
    best = int(np.argmax(col_means))
    sup = _mean_with_stderr(sup_mat[:, best])
    return SteinTerms(
        t1=t1,
        t2=t2,
        dg2_dg2=a,
        dgdg_sq=b,
        g4=c,
        c_f=c_f,
        sup_term=sup,
        sup_argmax=float(grid[best]),
        var_f=var_f,
        inner_mean=_mean_with_stderr(ip1),
    )


def _cf_value(a: MCValue, b: MCValue, c: MCValue) -> MCValue:
    """c(F) = sqrt(A) + B^{1/4} (C^{1/4} + 1) with delta-method stderr."""
    av = max(a.value, 0.0)
    bv = max(b.value, 0.0)
    cv = max(c.value, 0.0)
    value = math.sqrt(av) + bv**0.25 * (cv**0.25 + 1.0)
    var_acc = 0.0
    if a.stderr > 0.0:
        var_acc += (a.stderr / (2.0 * math.sqrt(max(av, a.stderr)))) ** 2
    if b.stderr > 0.0:
        db = 0.25 * max(bv, b.stderr) ** -0.75 * (cv**0.25 + 1.0)
        var_acc += (db * b.stderr) ** 2
    if c.stderr > 0.0:
        dc = bv**0.25 * 0.25 * max(cv, c.stderr) ** -0.75
        var_acc += (dc * c.stderr) ** 2
    return MCValue(value, math.sqrt(var_acc))


@dataclass
class BoundReport:
    """Everything the bound certificate needs, with standard errors."""

    kernel: dict
    k: int
    t: float
    seed: Optional[int]
    var_f: MCValue
    m: List[List[MCValue]]
    dk: BoundValue
    dw: BoundValue
    fourth_moment: MCValue
    r: Optional[List[List[Optional[MCValue]]]] = None
    stein_terms: Optional[SteinTerms] = None
    unreliable: Tuple[Tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        def _mcv(v):
            return None if v is None else {"value": v.value, "stderr": v.stderr}

        th = self.stein_terms
        return {
            "kernel": self.kernel,
            "k": self.k,
            "t": self.t,
            "seed": self.seed,
            "var_f": _mcv(self.var_f),
            "m": [[_mcv(v) for v in row] for row in self.m],
            "r": None if self.r is None else [[_mcv(v) for v in row] for row in self.r],
            "dk_bound": self.dk.value,
            "dk_bound_stderr": self.dk.stderr,
            "dk_bound_effective": self.dk.effective,
            "dw_bound": self.dw.value,
            "dw_bound_stderr": self.dw.stderr,
            "fourth_moment_bound": self.fourth_moment.value,
            "fourth_moment_bound_stderr": self.fourth_moment.stderr,
            "t1": _mcv(th.t1) if th else None,
            "t2": _mcv(th.t2) if th else None,
            "c_f": _mcv(th.c_f) if th else None,
            "sup_term": _mcv(th.sup_term) if th else None,
            "sup_term_note": th.note if th else None,
            "unreliable": [list(ij) for ij in self.unreliable],
        }


def bound_report(
    kernel: SymmetricKernel,
    intensity: IntensitySpec,
    *,
    seed: int,
    m_samples: int = 200_000,
    var_samples: int = 200_000,
    with_rij: bool = False,
    rij_reps: int = 2000,
    rij_z_samples: int = 256,
    with_stein_terms: bool = False,
    term_reps: int = 2000,
    z_samples: int = 128,
    s_grid: Optional[np.ndarray] = None,
    mc: Optional[MarginalIntegration] = None,
) -> BoundReport:
    """Assemble the full certificate with a deterministic stream tree.

    Every Monte Carlo stage (variance, each M_ij, each R_ij, the
    replication terms) draws from its own child stream of ``seed``, so the
    report is reproducible and individual stages are independent.
    """
    k = kernel.order
    _check_order(k)

    def _stream(*key):
        return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))

    vr = variance_from_kernels(kernel, intensity, mc_samples=var_samples, rng=_stream(0), mc=mc)
    var_f = MCValue(vr.variance, vr.stderr)

    m = [
        [
            compute_Mij(kernel, intensity, i, j, samples=m_samples, rng=_stream(1, i, j), mc=mc)
            for j in range(1, k + 1)
        ]
        for i in range(1, k + 1)
    ]
    unreliable = tuple(
        (i + 1, j + 1)
        for i in range(k)
        for j in range(k)
        if m[i][j].value > 0.0 and m[i][j].stderr > UNRELIABLE_RATIO * m[i][j].value
    )

    r = None
    if with_rij:
        if k > 2:
            raise ValueError("R_ij estimation is supported for kernel order <= 2 only")
        r = [
            [
                estimate_Rij(
                    kernel,
                    intensity,
                    i,
                    j,
                    reps=rij_reps,
                    z_samples=rij_z_samples,
                    rng=_stream(2, i, j),
                )
                for j in range(1, k + 1)
            ]
            for i in range(1, k + 1)
        ]

    stein_terms = None
    if with_stein_terms:
        stein_terms = estimate_stein_terms(
            kernel,
            intensity,
            reps=term_reps,
            z_samples=z_samples,
            s_grid=s_grid,
            rng=_stream(3),
            var_f=var_f,
            mc=mc,
        )

    return BoundReport(
        kernel=kernel_descriptor(kernel),
        k=k,
        t=intensity.t,
        seed=int(seed),
        var_f=var_f,
        m=m,
        dk=dk_bound(m, var_f, k),
        dw=dw_bound(m, var_f, k),
        fourth_moment=fourth_moment_bound(m, var_f, k),
        r=r,
        stein_terms=stein_terms,
        unreliable=unreliable,
    )
