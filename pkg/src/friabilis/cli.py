"""Command-line front end.

Subcommands mirror the library layers: `rho` (Dickman), `saddle` (counting
estimates), `divdist` (one n's law summary), `tail` (one (n, z) tail
report), and the batch drivers `clt`, `average`, `concentration`,
`arcsine`.  Exit codes: 0 success, 1 interrupted output pipe, 2
configuration or domain error, 3 resource-limit error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from friabilis.arith import factorize, psi_exact
from friabilis.dickman import dickman_rho, psi_dickman_estimate
from friabilis.divdist import exact_law, moments
from friabilis.errors import ConfigError, DomainError, ResourceLimitError
from friabilis.experiments import (
    SCHEMA_VERSION,
    AverageRunConfig,
    CltRunConfig,
    ConcentrationRunConfig,
    RunResult,
    arcsine_check,
    run_average,
    run_clt,
    run_concentration,
)
from friabilis.perron import tail_report
from friabilis.saddle import make_context, psi_saddle_estimate

_PSI_EXACT_BUDGET = 5_000_000  # enumeration nodes the saddle view will spend


def _int_arg(text: str) -> int:
    # accept 10**k shorthand like 1e8 on the command line
    try:
        return int(text, 0)
    except ValueError:
        value = float(text)
        out = int(value)
        if out != value:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        return out


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _perron_arg(text: str) -> tuple[float, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected T,steps")
    return float(parts[0]), int(parts[1])


def _print_aligned(pairs) -> None:
    width = max(len(name) for name, _ in pairs)
    for name, value in pairs:
        text = f"{value:.12g}" if isinstance(value, float) else str(value)
        print(f"{name:<{width}}  {text}")


def _emit_result(result: RunResult, args) -> int:
    if args.out:
        result.write_csv(args.out)
    if args.json:
        print(result.to_json())
    if not args.out and not args.json:
        print(f"# schema={SCHEMA_VERSION}")
        print(",".join(result.header))
        for row in result.rows:
            cells = [getattr(row, name) for name in result.header]
            print(",".join(repr(c) if isinstance(c, float) else str(c) for c in cells))
    return 0


def _cmd_rho(args) -> int:
    print(f"{dickman_rho(args.u):.12g}")
    return 0


def _cmd_saddle(args) -> int:
    ctx = make_context(args.x, args.y)
    try:
        exact = psi_exact(args.x, args.y, limit=_PSI_EXACT_BUDGET)
    except ResourceLimitError:
        exact = None
    pairs = [
        ("alpha", ctx.alpha),
        ("log_zeta", ctx.log_zeta),
        ("sigma2_star", ctx.sigma2_star),
        ("sigma_bar_sq", ctx.sigma_bar_sq),
        ("u", ctx.u),
        ("u_bar", ctx.u_bar),
        ("psi_saddle", psi_saddle_estimate(ctx)),
        ("psi_dickman", psi_dickman_estimate(args.x, args.y)),
        ("psi_exact", exact if exact is not None else "-"),
    ]
    if args.json:
        payload = {name: value for name, value in pairs if value != "-"}
        print(json.dumps(payload, sort_keys=True))
    else:
        _print_aligned(pairs)
    return 0


def _cmd_divdist(args) -> int:
    f = factorize(args.n)
    mom = moments(f)
    if args.atoms:
        law = exact_law(f)
        print(f"# schema={SCHEMA_VERSION}")
        print("value,mass_num,mass_den")
        for value, mass in law.atoms():
            print(f"{value!r},{mass.numerator},{mass.denominator}")
        return 0
    _print_aligned(
        [
            ("n", f.n),
            ("tau", mom.tau),
            ("sigma_sq", mom.m2),
            ("m4", mom.m4),
            ("w", mom.w),
            ("t_max", mom.t_max),
        ]
    )
    return 0


def _cmd_tail(args) -> int:
    report = tail_report(args.n, args.z, perron=args.perron)
    print(json.dumps(dataclasses.asdict(report), sort_keys=True))
    return 0


def _cmd_clt(args) -> int:
    config = CltRunConfig(
        x=args.x,
        y=args.y,
        z_grid=args.z_grid,
        C=args.C,
        w_min=args.w_min,
        seed=args.seed,
        sample_cap=args.sample_cap,
    )
    return _emit_result(run_clt(config, B=args.B), args)


def _cmd_average(args) -> int:
    config = AverageRunConfig(x=args.x, y=args.y, z_grid=args.z_grid, c5=args.c5)
    return _emit_result(run_average(config), args)


def _cmd_concentration(args) -> int:
    config = ConcentrationRunConfig(
        x=args.x,
        y=args.y,
        k_list=args.k_list,
        thresholds=args.thresholds,
        bins=args.bins,
    )
    return _emit_result(run_concentration(config), args)


def _cmd_arcsine(args) -> int:
    return _emit_result(arcsine_check(args.x, args.vs), args)


def _add_output_flags(sub) -> None:
    sub.add_argument("--out", help="write rows as CSV to this path")
    sub.add_argument("--json", action="store_true", help="print rows and metadata as JSON")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="friabilis",
        description="exact divisor laws on smooth integers and their tail approximations",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    rho = subs.add_parser("rho", help="Dickman rho at a point")
    rho.add_argument("--u", type=float, required=True)
    rho.set_defaults(handler=_cmd_rho)

    sad = subs.add_parser("saddle", help="saddle-point counting estimates for (x, y)")
    sad.add_argument("--x", type=_int_arg, required=True)
    sad.add_argument("--y", type=_int_arg, required=True)
    sad.add_argument("--json", action="store_true")
    sad.set_defaults(handler=_cmd_saddle)

    dd = subs.add_parser("divdist", help="divisor-law summary for one n")
    dd.add_argument("--n", type=_int_arg, required=True)
    dd.add_argument(
        "--atoms", action="store_true", help="emit the full atom list as CSV"
    )
    dd.set_defaults(handler=_cmd_divdist)

    tail = subs.add_parser("tail", help="tail report for one (n, z) as JSON")
    tail.add_argument("--n", type=_int_arg, required=True)
    tail.add_argument("--z", type=float, required=True)
    tail.add_argument(
        "--perron",
        type=_perron_arg,
        default=None,
        metavar="T,STEPS",
        help="also run the contour integral with this truncation and panel count",
    )
    tail.set_defaults(handler=_cmd_tail)

    clt = subs.add_parser("clt", help="per-n Gaussian tail error sweep over S(x, y)")
    clt.add_argument("--x", type=_int_arg, required=True)
    clt.add_argument("--y", type=_int_arg, required=True)
    clt.add_argument("--z-grid", type=_float_list, required=True)
    clt.add_argument("--C", type=float, default=10.0)
    clt.add_argument("--B", type=float, default=1.0)
    clt.add_argument("--w-min", type=float, default=0.0)
    clt.add_argument("--seed", type=int, default=0)
    clt.add_argument("--sample-cap", type=int, default=200_000)
    _add_output_flags(clt)
    clt.set_defaults(handler=_cmd_clt)

    avg = subs.add_parser("average", help="ensemble-averaged tails over S(x, y)")
    avg.add_argument("--x", type=_int_arg, required=True)
    avg.add_argument("--y", type=_int_arg, required=True)
    avg.add_argument("--z-grid", type=_float_list, required=True)
    avg.add_argument("--c5", type=float, default=1.0)
    _add_output_flags(avg)
    avg.set_defaults(handler=_cmd_average)

    conc = subs.add_parser(
        "concentration", help="concentration of additive statistics over S(x, y)"
    )
    conc.add_argument("--x", type=_int_arg, required=True)
    conc.add_argument("--y", type=_int_arg, required=True)
    conc.add_argument("--k-list", type=_int_list, default=(0, 1, 2))
    conc.add_argument("--thresholds", type=_float_list, default=(0.1, 0.25, 0.5))
    conc.add_argument("--bins", type=int, default=40)
    _add_output_flags(conc)
    conc.set_defaults(handler=_cmd_concentration)

    arc = subs.add_parser("arcsine", help="arcsine profile of divisor counts up to x")
    arc.add_argument("--x", type=_int_arg, required=True)
    arc.add_argument("--vs", type=_float_list, default=(0.25, 0.5))
    _add_output_flags(arc)
    arc.set_defaults(handler=_cmd_arcsine)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `... | head`); the interpreter
        # would raise again while flushing stdout at shutdown, so point the
        # descriptor at devnull and exit quietly like any other filter
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1


if __name__ == "__main__":
    sys.exit(main())
