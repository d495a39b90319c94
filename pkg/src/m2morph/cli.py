"""
Command-line surface: solve, evaluate, verify, and export.

Subcommands
-----------
exact       solve the eikonal PDE for the exact distance, write an MG1 field
approx      evaluate a closed-form approximation on a grid, write MG1
error       mean relative error of an approximation against a solved field
table4      error sweep over spatial anisotropies (w1 = w3 = 1, w2 varies)
bounds      check the global bound sandwich on a solved field
symmetries  check invariance under the 8 fundamental symmetries
kernel      write a morphological kernel field
erode       apply erosion to an MG1 field
dilate      apply dilation to an MG1 field
convect     transport an MG1 field along a left-invariant flow
iso         export isocontours per theta slice as CSV

Exit codes: 0 = pass, 1 = verification/computation failure, 2 = usage error.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import (
    isocontour_export,
    mean_relative_error,
    verify_bounds,
    verify_symmetries,
    write_contours_csv,
)
from .approx import ApproxKind, KernelParams, approx_distance
from .eikonal import SolverError, SolverOpts, solve_exact_distance, solve_subriemannian_distance
from .grid import GridSpec, ScalarField, read_mg1, write_csv, write_mg1
from .metric import MetricParams
from .morphology import ConvectionSpec, MorphKernelSpec, convect, dilate, erode

_KIND_NAMES = {k.value: k for k in ApproxKind}

_TABLE4_ZETAS = (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)


def _add_metric_args(p):
    p.add_argument("--w1", type=float, default=1.0, help="forward weight (default 1)")
    p.add_argument("--w2", type=float, default=1.0, help="sideways weight (default 1)")
    p.add_argument("--w3", type=float, default=1.0, help="angular weight (default 1)")


def _add_grid_args(p, default_grid=101):
    p.add_argument("--grid", type=int, default=default_grid, metavar="N",
                   help=f"nodes per axis (default {default_grid})")
    p.add_argument("--xmax", type=float, default=3.0,
                   help="spatial half-extent (default 3)")


def _metric(args) -> MetricParams:
    return MetricParams(args.w1, args.w2, args.w3)


def _gridspec(args) -> GridSpec:
    return GridSpec(args.grid, args.grid, args.grid, x_max=args.xmax)


def _kind(name: str) -> ApproxKind:
    try:
        return _KIND_NAMES[name]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown approximation {name!r}; choose from {sorted(_KIND_NAMES)}"
        )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="m2morph",
        description="Distances and morphological kernels on the space of "
                    "2-D positions and orientations.",
    )
    ap.add_argument("--seed", type=int, default=0,
                    help="RNG seed for sampled verifications (default 0)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="solve the exact distance field")
    _add_metric_args(p)
    _add_grid_args(p)
    p.add_argument("--tol", type=float, default=1e-6, help="solver tolerance")
    p.add_argument("--max-sweeps", type=int, default=500)
    p.add_argument("--sub", action="store_true",
                   help="sub-Riemannian proxy (sideways weight kappa*w1)")
    p.add_argument("--kappa", type=float, default=100.0)
    p.add_argument("--out", required=True, help="output MG1 path")

    p = sub.add_parser("approx", help="evaluate an approximation on a grid")
    _add_metric_args(p)
    _add_grid_args(p)
    p.add_argument("--approx", type=_kind, required=True)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--out", required=True, help="output MG1 path")

    p = sub.add_parser("error", help="mean relative error against a solved field")
    p.add_argument("--field", required=True, help="solved exact MG1 field")
    p.add_argument("--approx", type=_kind, default=ApproxKind.RHO_B)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--out", default=None, help="optional CSV path")

    p = sub.add_parser("table4", help="error sweep over spatial anisotropies")
    _add_grid_args(p)
    p.add_argument("--approx", type=_kind, default=ApproxKind.RHO_B)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--zetas", default=",".join(str(z) for z in _TABLE4_ZETAS),
                   help="comma-separated anisotropies")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-sweeps", type=int, default=500)
    p.add_argument("--out", default=None, help="optional CSV path")

    p = sub.add_parser("bounds", help="verify the global bound sandwich")
    p.add_argument("--field", required=True)
    p.add_argument("--slack", type=float, default=0.03)
    p.add_argument("--inner", type=float, default=0.95)

    p = sub.add_parser("symmetries", help="verify the 8 fundamental symmetries")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--approx", type=_kind, default=None,
                   help="single closed form (default: all)")
    g.add_argument("--field", default=None, help="solved MG1 field")
    _add_metric_args(p)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--n", type=int, default=100_000, help="sample points")

    p = sub.add_parser("kernel", help="write a morphological kernel field")
    _add_metric_args(p)
    _add_grid_args(p)
    p.add_argument("--approx", type=_kind, default=ApproxKind.RHO_B)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--out", required=True)

    for name in ("erode", "dilate"):
        p = sub.add_parser(name, help=f"{name} an MG1 field")
        _add_metric_args(p)
        p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--approx", type=_kind, default=ApproxKind.RHO_B)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--time", type=float, required=True)
        p.add_argument("--radius", type=float, default=None,
                       help="window truncation radius (metric length)")
        p.add_argument("--out", required=True)

    p = sub.add_parser("convect", help="transport an MG1 field")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--v", required=True, help="tangent vector c1,c2,c3")
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("iso", help="export isocontours per theta slice")
    _add_metric_args(p)
    _add_grid_args(p, default_grid=101)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--approx", type=_kind, default=None)
    g.add_argument("--field", default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--slices", default="all",
                   help="comma-separated theta values, or 'all'")
    p.add_argument("--out", required=True)

    return ap


def _cmd_exact(args) -> int:
    spec = _gridspec(args)
    w = _metric(args)
    opts = SolverOpts(tol=args.tol, max_sweeps=args.max_sweeps)
    if args.sub:
        f = solve_subriemannian_distance(spec, w, opts, kappa=args.kappa)
    else:
        f = solve_exact_distance(spec, w, opts)
    write_mg1(f, args.out)
    print(f"wrote {args.out} ({f.kind}, {f.meta.get('sweeps')} sweeps)")
    return 0


def _cmd_approx(args) -> int:
    spec = _gridspec(args)
    w = _metric(args)
    values = approx_distance(args.approx, spec.points(), w, nu=args.nu)
    f = ScalarField(spec=spec, values=values, w=w, kind=args.approx.value)
    write_mg1(f, args.out)
    print(f"wrote {args.out} ({f.kind})")
    return 0


def _error_row(report) -> str:
    return (f"{report.kind.value},{report.w.zeta():.17g},"
            f"{report.mean_rel_err:.17g},{report.max_rel_err:.17g},"
            f"{report.n_excluded}")


_ERROR_HEADER = "approx,zeta,mean_rel_err,max_rel_err,n_excluded"


def _cmd_error(args) -> int:
    f = read_mg1(args.field)
    if f.kind not in ("exact", "subriemannian"):
        print(f"error: field kind {f.kind!r} is not a solved distance", file=sys.stderr)
        return 1
    report = mean_relative_error(args.approx, f, nu=args.nu)
    lines = [_ERROR_HEADER, _error_row(report)]
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    return 0


def _cmd_table4(args) -> int:
    zetas = [float(z) for z in args.zetas.split(",") if z]
    spec = _gridspec(args)
    opts = SolverOpts(tol=args.tol, max_sweeps=args.max_sweeps)
    lines = [_ERROR_HEADER]
    for zeta in zetas:
        w = MetricParams(1.0, zeta, 1.0)
        f = solve_exact_distance(spec, w, opts)
        report = mean_relative_error(args.approx, f, nu=args.nu)
        row = _error_row(report)
        print(row, flush=True)
        lines.append(row)
    if args.out:
        with open(args.out, "w", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    return 0


def _cmd_bounds(args) -> int:
    f = read_mg1(args.field)
    report = verify_bounds(f, slack=args.slack, inner=args.inner)
    print(report.summary())
    return 0 if report.passed else 1


def _cmd_symmetries(args) -> int:
    w = _metric(args)
    if args.field is not None:
        f = read_mg1(args.field)
        report = verify_symmetries(f, n_points=args.n, seed=args.seed)
        print(f"field {args.field}: {report.summary()}")
        return 0 if report.passed else 1
    kinds = [args.approx] if args.approx is not None else list(ApproxKind)
    ok = True
    for kind in kinds:
        report = verify_symmetries(kind, w=w, n_points=args.n, seed=args.seed,
                                   nu=args.nu)
        print(f"{kind.value}: {report.summary()}")
        ok = ok and report.passed
    return 0 if ok else 1


def _cmd_kernel(args) -> int:
    spec = _gridspec(args)
    w = _metric(args)
    kp = KernelParams(alpha=args.alpha, t=args.time)
    rho = approx_distance(args.approx, spec.points(), w, nu=args.nu)
    values = (kp.t / kp.beta) * (rho / kp.t) ** kp.beta
    f = ScalarField(spec=spec, values=values, w=w, kind=f"kernel-{args.approx.value}")
    write_mg1(f, args.out)
    print(f"wrote {args.out} ({f.kind})")
    return 0


def _cmd_morph(args, op) -> int:
    U = read_mg1(args.infile)
    w = _metric(args)
    k = MorphKernelSpec(
        kind=args.approx,
        kp=KernelParams(alpha=args.alpha, t=args.time),
        w=w,
        window_radius=args.radius,
        nu=args.nu,
    )
    out = op(k, U)
    out.w = w
    write_mg1(out, args.out)
    print(f"wrote {args.out} ({out.kind})")
    return 0


def _cmd_convect(args) -> int:
    U = read_mg1(args.infile)
    try:
        v = tuple(float(c) for c in args.v.split(","))
        spec = ConvectionSpec(v=v, t=args.time)
    except ValueError as exc:
        print(f"usage error: bad vector {args.v!r}: {exc}", file=sys.stderr)
        return 2
    out = convect(spec, U)
    write_mg1(out, args.out)
    print(f"wrote {args.out} (convected)")
    return 0


def _cmd_iso(args) -> int:
    w = _metric(args)
    if args.field is not None:
        target = read_mg1(args.field)
        spec = target.spec
    elif args.approx is not None:
        target = args.approx
        spec = _gridspec(args)
    else:
        print("usage error: iso needs --approx or --field", file=sys.stderr)
        return 2
    if args.slices == "all":
        slices = list(spec.theta_axis())
    else:
        slices = [float(t) for t in args.slices.split(",") if t]
    rows = isocontour_export(target, args.level, slices, spec=spec, w=w, nu=args.nu)
    write_contours_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} contour points)")
    return 0


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if args.command == "exact":
            return _cmd_exact(args)
        if args.command == "approx":
            return _cmd_approx(args)
        if args.command == "error":
            return _cmd_error(args)
        if args.command == "table4":
            return _cmd_table4(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "symmetries":
            return _cmd_symmetries(args)
        if args.command == "kernel":
            return _cmd_kernel(args)
        if args.command == "erode":
            return _cmd_morph(args, erode)
        if args.command == "dilate":
            return _cmd_morph(args, dilate)
        if args.command == "convect":
            return _cmd_convect(args)
        if args.command == "iso":
            return _cmd_iso(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command!r}")


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
