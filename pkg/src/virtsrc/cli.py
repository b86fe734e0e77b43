"""Command-line driver.

Examples
--------
::

    virtsrc solve --geometry flower --k 12.566 --nlambda 12 --out run.csv
    virtsrc spectrum --nlambda 12 --beta 1 --out eigs.csv
    virtsrc table --nlambdas 12 24 48 --betas 0 0.5 1 --out table1.csv
    virtsrc mie-compare --geometry circle:1 --nlambda 24 --h 0.0208333 --out field.csv
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import experiments as ex

logger = logging.getLogger("virtsrc")


def _wavenumber(text: str) -> float:
    """Accepts plain numbers and multiples of pi such as ``4pi`` or ``4*pi``."""
    t = text.strip().lower().replace("*", "")
    if t.endswith("pi"):
        head = t[:-2]
        return (float(head) if head else 1.0) * math.pi
    return float(t)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--geometry", default="flower", help="flower | circle:R | file:PATH (default flower)")
    p.add_argument("--k", type=_wavenumber, default=4 * math.pi, help="wavenumber, e.g. 12.57 or 4pi")
    p.add_argument("--nlambda", type=float, default=12.0, help="elements per wavelength")
    p.add_argument("--beta", type=float, default=1.0, help="h = c * lambda / nlambda**beta")
    p.add_argument("--h-const", type=float, default=None,
                   help="constant c in the h rule (default: h = lambda/12 at nlambda = 12)")
    p.add_argument("--h", type=float, default=None, help="explicit displacement, overrides the h rule")
    p.add_argument("--pade-terms", type=int, default=4)
    p.add_argument("--pade-angle", type=float, default=math.pi / 2)
    p.add_argument("--damping", type=float, default=0.0, help="k_eps = k + i*damping*k^(1/3)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--restart", type=int, default=None)
    p.add_argument("--node-rule", choices=("parameter", "arclength"), default="parameter")
    p.add_argument("--n", type=int, default=None, help="explicit node count")
    p.add_argument("--matrix-free", action="store_true", help="do not cache kernel matrices")
    p.add_argument("--out", default=None, help="output file (stdout summary only if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="virtsrc", description="Preconditioned virtual-source Helmholtz solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one scattering problem and report the error")
    _common(p)
    p.add_argument("--experiment", choices=("auto", "manufactured", "planewave"), default="auto",
                   help="auto: planewave on circles, manufactured otherwise")
    p.add_argument("--history", default=None, help="write the GMRES residual history to this CSV")
    p.add_argument("--density", default=None, help="write the density (t, x, y, re, im) to this CSV")

    p = sub.add_parser("spectrum", help="eigenvalues of the dense preconditioned matrix")
    _common(p)
    p.add_argument("--operator", choices=("BA", "A"), default="BA")

    p = sub.add_parser("table", help="condition number / error sweep over nlambda and beta")
    _common(p)
    p.add_argument("--nlambdas", type=float, nargs="+", default=[12, 24, 48, 96])
    p.add_argument("--betas", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    p.add_argument("--no-spectra", action="store_true", help="skip the dense eigenvalue solves")

    p = sub.add_parser("mie-compare", help="numeric vs series field on a grid around a circle")
    _common(p)
    p.add_argument("--extent", type=float, default=2.0, help="grid half-width in radii")
    p.add_argument("--points", type=int, default=81, help="grid points per axis")
    return parser


def _config(args, kind: str) -> ex.ExperimentConfig:
    return ex.ExperimentConfig(
        geometry=args.geometry, k=args.k, nlambda=args.nlambda, beta=args.beta, h_const=args.h_const,
        h=args.h, pade_terms=args.pade_terms, pade_angle=args.pade_angle, damping=args.damping,
        tol=args.tol, max_iter=args.max_iter, restart=args.restart, kind=kind, out=args.out,
        node_rule=args.node_rule, n=args.n, matrix_free=args.matrix_free,
    )


def _print_summary(summary: dict) -> None:
    print(json.dumps(ex._jsonable(summary), indent=1))


def cmd_solve(args) -> int:
    kind = args.experiment
    if kind == "auto":
        kind = "planewave" if args.geometry.startswith("circle") else "manufactured"
    config = _config(args, kind)
    report = ex.run_solve(config)
    if args.out:
        ex.write_report(report, args.out, args.format)
    if args.history:
        ex.write_rows(args.history, ["iteration", "residual"], list(enumerate(report.residuals)))
    if args.density:
        _, op = ex.build_operator(config)
        mesh = op.mesh
        rows = [(t, x, y, d.real, d.imag) for t, (x, y), d in zip(mesh.t, mesh.nodes, report.density)]
        ex.write_rows(args.density, ["t", "x", "y", "re", "im"], rows)
    _print_summary(report.summary())
    return 0 if report.converged else 2


def cmd_spectrum(args) -> int:
    report = ex.run_spectrum(_config(args, "spectrum"), which=args.operator)
    if args.out:
        ex.write_eigenvalues(report, args.out, args.format)
    summary = report.summary()
    summary["max_abs"] = float(abs(report.eigenvalues).max())
    summary["min_abs"] = float(abs(report.eigenvalues).min())
    _print_summary(summary)
    return 0


def cmd_table(args) -> int:
    config = _config(args, "table")
    csv_out = args.out if args.format == "csv" else None
    rows = ex.run_table(config, args.nlambdas, args.betas, out=csv_out, spectra=not args.no_spectra)
    if args.out and args.format == "json":
        ex.write_rows(args.out, list(ex.TABLE_FIELDS), [[r[k] for k in ex.TABLE_FIELDS] for r in rows], "json")
    for row in rows:
        print(", ".join(f"{key}={row[key]:.4g}" if isinstance(row[key], float) else f"{key}={row[key]}"
                        for key in ex.TABLE_FIELDS))
    return 0


def cmd_mie_compare(args) -> int:
    report, rows = ex.run_mie_compare(_config(args, "mie-compare"), args.extent, args.points)
    if args.out:
        header = ["x", "y", "re_u", "im_u", "abs_u", "re_exact", "im_exact", "abs_err"]
        ex.write_rows(args.out, header, rows, args.format)
    _print_summary(report.summary())
    return 0


COMMANDS = {"solve": cmd_solve, "spectrum": cmd_spectrum, "table": cmd_table, "mie-compare": cmd_mie_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, ArithmeticError) as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
