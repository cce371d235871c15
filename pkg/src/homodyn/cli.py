"""Experiment runner: named base points, config parsing, module dispatch,
CSV/SVG artifact output.

Exit codes: 0 success, 1 configuration error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .diophantine import (
    DivergentOrbitError,
    cf_expand,
    cf_from_quotients,
    excursion_type_estimate,
    exponent_bundle,
    planted_quotients,
    point_type_check,
    slope_base,
    type_estimate,
)
from .fractal import assembled_dimension, build_tree, cover_sum, dimension_lower_bound
from .goodfn import GoodFnParams, verify_good
from .lattice import SectorQuery, enumerate_orbit, gap_constants, sector_count
from .mollify import (
    MollifierSpec,
    box_decay_report,
    verify_mollifier,
    weighted_box_average,
)
from .orbits import (
    default_suite,
    discrepancy,
    golden_ratio,
    height_band,
    piece_decomposition,
    progression_average,
    sample_curve,
    sample_sparse,
    twisted_average,
)
from .psl2 import GroupElement, GroupError, identity
from .report import ExperimentReport, emit_csv, emit_svg
from .surface import ReductionError, reduce

DEFAULT_SEED = 20250809


class ConfigError(ValueError):
    pass


def parse_base(text: str) -> GroupElement:
    """Named base points: identity, golden, sqrt2, e, liouville(k), or an
    explicit a,b,c,d matrix."""
    t = text.strip().lower()
    if t == "identity":
        return identity()
    if t == "golden":
        return slope_base(golden_ratio)
    if t == "sqrt2":
        return slope_base(math.sqrt(2.0))
    if t == "e":
        return slope_base(math.e)
    m = re.fullmatch(r"liouville\((\d+(?:\.\d+)?)\)", t)
    if m:
        zeta = float(m.group(1))
        cf = cf_from_quotients(planted_quotients(zeta))
        return slope_base(float(cf.exact_value))
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) == 4:
        try:
            return GroupElement(*(float(p) for p in parts))
        except (ValueError, GroupError) as exc:
            raise ConfigError(f"bad matrix base {text!r}: {exc}") from None
    raise ConfigError(f"unknown base point {text!r}")


def load_config(path: str) -> dict:
    """Plain key=value lines; '#' starts a comment."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _suite_means_report(series, suite, dyadic):
    return discrepancy(series, suite, dyadic=dyadic)


def run_orbit(args) -> ExperimentReport:
    p = reduce(parse_base(args.base))
    series = sample_sparse(p, args.gamma, args.N, threads=args.threads)
    rep = _suite_means_report(series, default_suite(), args.dyadic)
    if args.svg:
        emit_svg(series.xs, series.ys, args.svg)
    return rep


def run_curve(args) -> ExperimentReport:
    p = reduce(parse_base(args.base))
    grid = np.geomspace(1.0, args.xmax, args.points)
    series = sample_curve(p, args.gamma, grid, threads=args.threads)
    rep = _suite_means_report(series, default_suite(), args.dyadic)
    rep.name = "curve_discrepancy"
    if args.svg:
        emit_svg(series.xs, series.ys, args.svg)
    return rep


def run_twist(args) -> ExperimentReport:
    p = reduce(parse_base(args.base))
    f = height_band(args.band)
    rep = ExperimentReport(
        name="twisted_average",
        params={"base": args.base, "frequency": args.frequency, "band": args.band},
        columns=["T", "re", "im", "abs_centered"],
    )
    for T in args.T:
        mu = twisted_average(p, T, args.frequency, f)
        w = 2j * math.pi * args.frequency
        mu_one = (np.exp(w * T) - 1.0) / (w * T) if args.frequency else 1.0
        centered = mu - f.haar_mean * mu_one
        rep.add_row(T, float(mu.real), float(mu.imag), abs(centered))
    return rep


def run_prog(args) -> ExperimentReport:
    p = reduce(parse_base(args.base))
    f = height_band(args.band)
    rep = ExperimentReport(
        name="progression_average",
        params={"base": args.base, "K_exponent": args.K_exponent, "band": args.band},
        columns=["T", "K", "centered_average"],
    )
    for T in args.T:
        K = T ** args.K_exponent if args.K_exponent else args.K
        rep.add_row(T, K, progression_average(p, K, T, f))
    return rep


def run_pieces(args) -> ExperimentReport:
    p = reduce(parse_base(args.base))
    return piece_decomposition(p, args.gamma, args.eps, args.N, args.kappa)


def run_dio(args) -> ExperimentReport:
    rep = ExperimentReport(
        name="diophantine_report",
        params={"x": args.x, "depth": args.depth, "kappa": args.kappa,
                "bound": args.bound},
        columns=["quantity", "value"],
        notes="bounded search: witnesses, never a proof of the vector condition",
    )
    if args.x is not None:
        cf = cf_expand(args.x, args.depth)
        est = type_estimate(cf)
        rep.add_row("type_estimate", est.value)
        rep.add_row("quotient_count", len(cf.quotients))
        p = reduce(slope_base(args.x))
    else:
        p = reduce(parse_base(args.base))
    witness, _, _ = point_type_check(p, args.kappa, args.bound)
    rep.add_row("witness_mu", witness.mu)
    rep.add_row("witness_nu", witness.nu)
    rep.add_row("witness_symmetric", witness.symmetric)
    rep.add_row("axis_vectors", len(witness.axis_vectors))
    try:
        kappa_hat, _ = excursion_type_estimate(p, args.tmax)
        rep.add_row("excursion_type", kappa_hat)
    except (DivergentOrbitError, ValueError):
        rep.add_row("excursion_type", float("nan"))
    return rep


def run_goodfn(args) -> ExperimentReport:
    params = GoodFnParams(a=args.a, b=args.b, kappa=args.kappa, gamma=args.gamma,
                          mu=args.mu, nu=args.nu,
                          rho=args.rho if args.rho else 0.0)
    eps_grid = [params.rho / 4.0, params.rho / 16.0, params.rho / 64.0]
    return verify_good(params, eps_grid, window_count=args.windows)


def run_count(args) -> ExperimentReport:
    vecs = enumerate_orbit(2.0 * args.l)
    q = SectorQuery(args.l, args.theta1, args.theta2)
    n = sector_count(vecs, q)
    c2, cx = gap_constants(vecs)
    rep = ExperimentReport(
        name="sector_count",
        params={"l": args.l, "theta1": args.theta1, "theta2": args.theta2},
        columns=["count", "l2_dtheta", "ratio", "gap_second", "gap_cross"],
    )
    area = args.l**2 * (args.theta2 - args.theta1)
    rep.add_row(n, area, n / area if area else float("nan"), c2, cx)
    return rep


def run_dim(args) -> ExperimentReport:
    rep = ExperimentReport(
        name="dimension_bounds",
        params={"kappa": args.kappa, "levels": args.levels,
                "schedule": ",".join(f"{l:g}" for l in args.schedule),
                "closed_form_full": assembled_dimension([args.kappa])},
        columns=["quantity", "value"],
    )
    crit = 2.0 / (args.kappa + 1.0)
    rep.add_row("slice_dimension_closed_form", crit)
    cs_above = cover_sum(args.kappa, min(1.0, crit + 0.05), args.R)
    cs_below = cover_sum(args.kappa, max(0.05, crit - 0.05), args.R)
    rep.add_row("cover_sum_above_threshold_convergent", int(cs_above.convergent))
    rep.add_row("cover_sum_below_threshold_convergent", int(cs_below.convergent))
    fam = build_tree(args.kappa, args.eps, args.levels, args.schedule)
    bound = dimension_lower_bound(fam)
    for j, v in enumerate(bound.series):
        rep.add_row(f"tree_bound_depth_{j + 1}", v)
    rep.add_row("tree_bound_final", bound.value)
    return rep


def run_mollify(args) -> ExperimentReport:
    rep = ExperimentReport(
        name="mollifier_check",
        params={"delta": args.delta, "n": args.n, "gamma": args.gamma_box},
        columns=["integral", "box_volume", "l1_to_box", "l1_bound"],
    )
    spec = MollifierSpec(delta=args.delta, n=args.n, gamma=args.gamma_box)
    integral, l1 = verify_mollifier(spec)
    rep.add_row(integral, args.gamma_box**args.n, l1,
                4.0 * args.n * args.delta * (args.gamma_box + args.delta) ** (args.n - 1))
    return rep


def run_box(args) -> ExperimentReport:
    p = reduce(parse_base(args.base))
    f = height_band(args.band)
    rep = box_decay_report(p, f, args.T)
    if args.weighted:
        spec = MollifierSpec(delta=0.1, n=1, gamma=1.0)
        w = weighted_box_average(p, args.T[-1], f, spec)
        rep.params["weighted_average"] = w
        rep.params["weighted_reference"] = f.haar_mean * spec.gamma
    return rep


def run_constants(args) -> ExperimentReport:
    bundle = exponent_bundle(args.s, args.kappa, epsilon=args.eps)
    rep = ExperimentReport(
        name="exponent_table",
        params={"s": args.s, "epsilon": args.eps},
        columns=["quantity", "value"],
    )
    rep.add_row("kappa_mix", bundle.kappa_mix)
    rep.add_row("beta", bundle.beta)
    rep.add_row("gamma0_spectral", bundle.gamma0_spectral)
    rep.add_row("gamma0_progression", bundle.gamma0_progression)
    return rep


_RUNNERS = {
    "orbit": run_orbit, "curve": run_curve, "twist": run_twist, "prog": run_prog,
    "pieces": run_pieces, "dio": run_dio, "goodfn": run_goodfn, "count": run_count,
    "dim": run_dim, "mollify": run_mollify, "box": run_box, "constants": run_constants,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homodyn",
        description="numerical experiments on flows over the modular surface",
    )
    parser.add_argument("--version", action="version", version=f"homodyn {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", type=str, default=None, help="CSV output path")
        p.add_argument("--svg", type=str, default=None, help="SVG scatter path")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("HOMODYN_THREADS", "1")))
        p.add_argument("--config", type=str, default=None,
                       help="key=value defaults file")

    p = sub.add_parser("orbit", help="sparse orbit discrepancy against Haar")
    p.add_argument("--base", default="golden")
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--N", type=int, default=100000)
    p.add_argument("--suite", choices=["default"], default="default")
    p.add_argument("--dyadic", action="store_true", default=True)
    common(p)

    p = sub.add_parser("curve", help="expanding-translate curve discrepancy")
    p.add_argument("--base", default="golden")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--xmax", type=float, default=1e6)
    p.add_argument("--points", type=int, default=100000)
    p.add_argument("--suite", choices=["default"], default="default")
    p.add_argument("--dyadic", action="store_true", default=True)
    common(p)

    p = sub.add_parser("twist", help="oscillation-twisted time averages")
    p.add_argument("--base", default="golden")
    p.add_argument("--frequency", type=float, default=0.37)
    p.add_argument("--T", type=float, nargs="+", default=[1e2, 1e3, 1e4])
    p.add_argument("--band", type=float, default=2.0)
    common(p)

    p = sub.add_parser("prog", help="arithmetic-progression averages")
    p.add_argument("--base", default="golden")
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--K-exponent", dest="K_exponent", type=float, default=0.05)
    p.add_argument("--T", type=float, nargs="+", default=[1e3, 1e4, 1e5])
    p.add_argument("--band", type=float, default=2.0)
    common(p)

    p = sub.add_parser("pieces", help="greedy block cover of sparse indices")
    p.add_argument("--base", default="golden")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--N", type=int, default=50000)
    p.add_argument("--kappa", type=float, default=1.0)
    common(p)

    p = sub.add_parser("dio", help="continued-fraction and point-type reports")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--base", default="golden")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--bound", type=int, default=1000)
    p.add_argument("--tmax", type=float, default=35.0)
    common(p)

    p = sub.add_parser("goodfn", help="sublevel-measure constants")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1e-5)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=5e-6)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--windows", type=int, default=50)
    common(p)

    p = sub.add_parser("count", help="annular sector counts of primitive vectors")
    p.add_argument("--l", type=float, default=1000.0)
    p.add_argument("--theta1", type=float, default=math.pi / 4.0)
    p.add_argument("--theta2", type=float, default=math.pi / 2.0)
    common(p)

    p = sub.add_parser("dim", help="dimension bounds and cover sums")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--schedule", type=lambda s: [float(x) for x in s.split(",")],
                   default=[50.0, 2500.0])
    p.add_argument("--R", type=int, default=10000)
    common(p)

    p = sub.add_parser("mollify", help="smoothed box indicator checks")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--gamma-box", dest="gamma_box", type=float, default=1.0)
    common(p)

    p = sub.add_parser("box", help="horocycle box-average decay")
    p.add_argument("--base", default="golden")
    p.add_argument("--T", type=float, nargs="+", default=[1e2, 1e3, 1e4])
    p.add_argument("--band", type=float, default=2.0)
    p.add_argument("--weighted", action="store_true")
    common(p)

    p = sub.add_parser("constants", help="exponent tables")
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--kappa", type=float, nargs="+", default=[1.0])
    p.add_argument("--eps", type=float, default=0.0)
    common(p)

    return parser


def _apply_config(parser, argv):
    """Config-file values become defaults; explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConfigError("--config needs a path")
    cfg = load_config(argv[i + 1])
    sub = argv[0]
    extra = []
    for key, value in cfg.items():
        flag = f"--{key}"
        if flag not in argv:
            extra.extend([flag, value] if value.lower() not in ("true",) else [flag])
    return [sub] + extra + argv[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and argv[0] in _RUNNERS:
            argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for bad flags: map the latter to 1
        return 0 if exc.code in (0, None) else 1
    try:
        report = _RUNNERS[args.experiment](args)
    except (ConfigError, GroupError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ReductionError, DivergentOrbitError, ArithmeticError, ValueError,
            OSError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    for key, value in report.params.items():
        print(f"# {key} = {value}")
    for row in report.rows[:40]:
        print(",".join(str(v) for v in row))
    if len(report.rows) > 40:
        print(f"# ... {len(report.rows) - 40} more rows")
    out = args.out or f"homodyn_{args.experiment}.csv"
    try:
        emit_csv(report, out, seed=args.seed, version=__version__)
    except OSError as exc:
        print(f"numeric failure: cannot write {out}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
