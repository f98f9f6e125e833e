"""Config-driven experiment runner.

Subcommands:
    sample        emit one point-process realization as CSV
    ustat         replicate a U-statistic, standardize, emit samples + distances
    bound         emit a bound-certificate report as JSON
    partitions    count and list the contraction partitions for (i, j)
    stein-check   emit the Stein-solution property report as JSON
    berry-esseen  exact Poisson Kolmogorov distances against 8/sqrt(t)
    experiment    t-sweep from a JSON config, CSV output

Exit codes: 0 success, 2 usage/config error, 3 numerical failure (an
unreliable bound integral under --strict).  Identical argv (including
--seed) produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from .bounds import bound_report
from .chaos import MCValue, variance_from_kernels
from .distance import empirical_dK, empirical_dW, poisson_exact_dK
from .kernels import make_kernel
from .measure import IntensitySpec, sample_point_process
from .partitions import count_partitions, enumerate_partitions
from .stein import check_stein_properties
from .ustat import evaluate

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


class ConfigError(ValueError):
    """Invalid CLI/config input; the message names the offending field."""


def _fmt(x) -> str:
    """Shortest round-trip decimal representation, for reproducible files."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_text(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_box(spec: Optional[str], dim: int):
    if spec is None:
        return [(0.0, 1.0)] * dim
    try:
        intervals = []
        for part in spec.split(";"):
            lo, hi = part.split(",")
            intervals.append((float(lo), float(hi)))
    except ValueError as exc:
        raise ConfigError(f"box: expected 'lo,hi;lo,hi;...', got {spec!r}") from exc
    return intervals


def _kernel_from_args(args) -> dict:
    desc = {"name": args.kernel}
    if args.kernel == "constant":
        desc["c"] = args.c
        desc["k"] = args.k
    elif args.kernel == "geometric_indicator":
        if args.r is None:
            raise ConfigError("r: geometric_indicator requires --r")
        desc["r"] = args.r
    return desc


def _intensity(box, t) -> IntensitySpec:
    try:
        return IntensitySpec(box, t=t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _replicate_standardized(kernel, intensity, reps, seed, var_samples):
    """Standardized samples of the U-statistic plus Var F used for scaling.

    Stream keys are length-2 tuples so they can never collide with the
    length-1/length-3 keys used inside bound_report under the same seed.
    """
    vr = variance_from_kernels(
        kernel,
        intensity,
        mc_samples=var_samples,
        rng=np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xFE, 0))),
    )
    if vr.variance <= 0:
        raise ConfigError("variance: estimated Var F is not positive")
    ef = kernel.full_integral(intensity)
    sigma = math.sqrt(vr.variance)
    vals = np.empty(reps)
    for rep in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xA0, rep)))
        cfg = sample_point_process(intensity, rng)
        vals[rep] = (evaluate(kernel, cfg).value - ef) / sigma
    return vals, MCValue(vr.variance, vr.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_sample(args) -> int:
    box = _parse_box(args.box, args.dim)
    intensity = _intensity(box, args.t)
    cfg = sample_point_process(intensity, np.random.default_rng(np.random.SeedSequence(args.seed)))
    lines = [",".join(f"x{c + 1}" for c in range(cfg.dim))]
    for row in cfg.points:
        lines.append(",".join(_fmt(float(v)) for v in row))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_ustat(args) -> int:
    kernel = make_kernel(_kernel_from_args(args))
    box = _parse_box(args.box, args.dim)
    intensity = _intensity(box, args.t)
    vals, var_f = _replicate_standardized(kernel, intensity, args.reps, args.seed, args.mc_samples)
    dk = empirical_dK(vals)
    dw = empirical_dW(vals)
    lines = [
        f"# kernel={json.dumps(_kernel_from_args(args), sort_keys=True)}",
        f"# t={_fmt(intensity.t)} reps={args.reps} seed={args.seed}",
        f"# var_f={_fmt(var_f.value)} var_f_se={_fmt(var_f.stderr)}",
        f"# dk_emp={_fmt(dk)} dw_emp={_fmt(dw)}",
        "standardized_value",
    ]
    lines.extend(_fmt(float(v)) for v in vals)
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_bound(args) -> int:
    kernel = make_kernel(_kernel_from_args(args))
    box = _parse_box(args.box, args.dim)
    intensity = _intensity(box, args.t)
    report = bound_report(
        kernel,
        intensity,
        seed=args.seed,
        m_samples=args.mc_samples,
        var_samples=args.mc_samples,
        with_rij=args.rij,
        rij_reps=args.reps,
        with_stein_terms=args.stein_terms,
        term_reps=args.reps,
        z_samples=args.z_samples,
    )
    _write_text(args.out, json.dumps(report.to_dict(), indent=2) + "\n")
    if args.strict and report.unreliable:
        print(
            f"error: unreliable M_ij estimates at {list(report.unreliable)}",
            file=sys.stderr,
        )
        return NUMERICAL_ERROR
    return 0


def _cmd_partitions(args) -> int:
    parts = enumerate_partitions(args.i, args.j)
    lines = [f"count={count_partitions(args.i, args.j)}"]
    lines.extend(str(p) for p in parts)
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_stein_check(args) -> int:
    report = check_stein_properties()
    _write_text(args.out, json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


def _cmd_berry_esseen(args) -> int:
    if args.tmax < 1:
        raise ConfigError("tmax: must be >= 1")
    lines = ["t,dk_exact,bound"]
    t = 1.0
    while t <= args.tmax:
        dk = poisson_exact_dK(t)
        lines.append(f"{_fmt(t)},{_fmt(dk)},{_fmt(8.0 / math.sqrt(t))}")
        t *= 2.0
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


_EXPERIMENT_FIELDS = {
    "kernel": dict,
    "box": list,
    "t_values": list,
    "seed": int,
    "reps": int,
    "mc_samples": int,
    "z_samples": int,
    "term_reps": int,
    "stein_terms": bool,
}


def _load_experiment_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    for key in ("kernel", "t_values", "seed"):
        if key not in cfg:
            raise ConfigError(f"{key}: missing required config field")
    for key, typ in _EXPERIMENT_FIELDS.items():
        if key in cfg and not isinstance(cfg[key], typ):
            raise ConfigError(f"{key}: expected {typ.__name__}")
    if not cfg["t_values"]:
        raise ConfigError("t_values: must be a nonempty list")
    cfg.setdefault("box", [[0.0, 1.0]])
    cfg.setdefault("reps", 1000)
    cfg.setdefault("mc_samples", 200_000)
    cfg.setdefault("z_samples", 128)
    cfg.setdefault("term_reps", 1000)
    cfg.setdefault("stein_terms", True)
    return cfg


_SWEEP_COLUMNS = (
    "t,var_f,var_f_se,dk_emp,dk_emp_se,dk_bound,dk_bound_se,"
    "dw_emp,dw_emp_se,dw_bound,dw_bound_se,t1,t1_se,t2,t2_se,sup_term,sup_term_se"
)


def _bootstrap_se(vals: np.ndarray, stat, seed: int, draws: int = 100) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xB007,)))
    n = len(vals)
    out = np.empty(draws)
    for b in range(draws):
        out[b] = stat(vals[rng.integers(0, n, n)])
    return float(out.std(ddof=1))


def _cmd_experiment(args) -> int:
    cfg = _load_experiment_config(args.config)
    try:
        kernel = make_kernel(cfg["kernel"])
    except ValueError as exc:
        raise ConfigError(f"kernel: {exc}") from exc
    rows = [_SWEEP_COLUMNS]
    for t in cfg["t_values"]:
        intensity = _intensity(cfg["box"], float(t))
        report = bound_report(
            kernel,
            intensity,
            seed=cfg["seed"],
            m_samples=cfg["mc_samples"],
            var_samples=cfg["mc_samples"],
            with_stein_terms=cfg["stein_terms"],
            term_reps=cfg["term_reps"],
            z_samples=cfg["z_samples"],
        )
        vals, _ = _replicate_standardized(
            kernel, intensity, cfg["reps"], cfg["seed"], cfg["mc_samples"]
        )
        dk_emp = empirical_dK(vals)
        dw_emp = empirical_dW(vals)
        dk_se = _bootstrap_se(vals, empirical_dK, cfg["seed"])
        dw_se = _bootstrap_se(vals, empirical_dW, cfg["seed"])
        th = report.stein_terms
        cells = [
            _fmt(float(t)),
            _fmt(report.var_f.value),
            _fmt(report.var_f.stderr),
            _fmt(dk_emp),
            _fmt(dk_se),
            _fmt(report.dk.value),
            _fmt(report.dk.stderr),
            _fmt(dw_emp),
            _fmt(dw_se),
            _fmt(report.dw.value),
            _fmt(report.dw.stderr),
            _fmt(th.t1.value) if th else "",
            _fmt(th.t1.stderr) if th else "",
            _fmt(th.t2.value) if th else "",
            _fmt(th.t2.stderr) if th else "",
            _fmt(th.sup_term.value) if th else "",
            _fmt(th.sup_term.stderr) if th else "",
        ]
        rows.append(",".join(cells))
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_kernel_flags(sub):
    sub.add_argument(
        "--kernel",
        required=True,
        choices=("count", "constant", "geometric_indicator"),
        help="built-in kernel name",
    )
    sub.add_argument("--r", type=float, help="radius of the distance indicator")
    sub.add_argument("--c", type=float, default=1.0, help="constant kernel value")
    sub.add_argument("--k", type=int, default=1, help="constant kernel order")


def _add_common(sub, *, seed_required=True):
    sub.add_argument("--seed", type=int, required=seed_required, default=0,
                     help="master seed; identical seeds give identical bytes")
    sub.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pustat",
        description="Gaussian-approximation bound certificates for Poisson U-statistics",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("sample", help="emit one point-process realization as CSV")
    p.add_argument("--t", type=float, required=True, help="intensity scale")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--box", help="'lo,hi;lo,hi;...' per dimension (default unit box)")
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = subs.add_parser("ustat", help="replicate, standardize, emit samples + distances")
    _add_kernel_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--box")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--mc-samples", type=int, default=200_000)
    _add_common(p)
    p.set_defaults(func=_cmd_ustat)

    p = subs.add_parser("bound", help="emit a bound-certificate report as JSON")
    _add_kernel_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--box")
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.add_argument("--reps", type=int, default=2000, help="replications for R/term estimates")
    p.add_argument("--z-samples", type=int, default=128)
    p.add_argument("--rij", action="store_true", help="estimate the R_ij matrix (order <= 2)")
    p.add_argument("--stein-terms", action="store_true", help="estimate the inner-product terms")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when a bound integral is flagged unreliable")
    _add_common(p)
    p.set_defaults(func=_cmd_bound)

    p = subs.add_parser("partitions", help="count and list contraction partitions")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    _add_common(p, seed_required=False)
    p.set_defaults(func=_cmd_partitions)

    p = subs.add_parser("stein-check", help="Stein-solution property report as JSON")
    _add_common(p, seed_required=False)
    p.set_defaults(func=_cmd_stein_check)

    p = subs.add_parser("berry-esseen", help="exact Poisson distances vs 8/sqrt(t)")
    p.add_argument("--tmax", type=float, default=1024.0)
    _add_common(p, seed_required=False)
    p.set_defaults(func=_cmd_berry_esseen)

    p = subs.add_parser("experiment", help="t-sweep from a JSON config, CSV output")
    p.add_argument("config", help="path to the experiment JSON config")
    _add_common(p, seed_required=False)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
