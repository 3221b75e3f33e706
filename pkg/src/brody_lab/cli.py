"""Command-line front end.

Exit codes: 0 all checks passed, 1 a check found a violation, 2 bad input,
3 numerical or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import InputError, NumericalFailure, ReportIOError
from .parallel import resolve_workers

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_FAILURE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _complex_arg(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise InputError(f"expected re,im but got {text!r}") from None
    if len(parts) not in (1, 2):
        raise InputError(f"expected re,im but got {text!r}")
    return complex(parts[0], parts[1] if len(parts) == 2 else 0.0)


def _pair_arg(text: str) -> tuple[float, float]:
    try:
        a, b = (float(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"expected two comma-separated numbers, got {text!r}") from None
    if not 0 < a < b:
        raise InputError(f"need 0 < first < second in {text!r}")
    return a, b


def parse_radii(text: str) -> np.ndarray:
    """``r0:r1:k``: ``k`` geometrically spaced radii from ``r0`` to ``r1``."""
    from .growth import geometric_radii
    try:
        r0, r1, k = text.split(":")
        return geometric_radii(float(r0), float(r1), int(k))
    except ValueError:
        raise InputError(f"radii must look like r0:r1:k, got {text!r}") from None


def _positive(value: float, name: str) -> float:
    if not value > 0 or not math.isfinite(value):
        raise InputError(f"{name} must be positive")
    return value


# --------------------------------------------------------------------------
# subcommands


def _cmd_spherical_grid(args) -> int:
    from .curve import load_curve, norm_log, polar_grid, spherical_derivative, sup_spherical
    from .report import write_report

    curve = load_curve(args.curve)
    _positive(args.radius, "radius")
    _positive(args.resolution, "resolution")
    z = polar_grid(0.0, args.radius, args.resolution)
    u = norm_log(curve, z)
    s = spherical_derivative(curve, z)
    rows = [{"x": float(p.real), "y": float(p.imag), "u": float(a), "spherical_derivative": float(b)}
            for p, a, b in zip(z, u, s)]
    write_report(rows, args.out, "csv")
    est = sup_spherical(curve, args.radius, args.resolution, shells=args.shells)
    summary = {"sup": est.sup, "argmax": est.argmax, "shell_edges": est.shell_edges,
               "shell_max": est.shell_max, "stability": est.stability, "points": len(rows)}
    if args.summary:
        write_report(summary, args.summary, "json")
    else:
        sys.stdout.write(write_report(summary, None, "json"))
    return EXIT_OK


def _cmd_characteristic(args) -> int:
    from .curve import load_curve
    from .growth import CSV_HEADER, growth_samples
    from .report import write_report

    curve = load_curve(args.curve)
    radii = parse_radii(args.radii)
    samples = growth_samples(curve, radii, method=args.method, tol=_positive(args.tol, "tol"),
                             workers=resolve_workers(args.parallel))
    text = write_report(samples, args.out, "csv", header=CSV_HEADER.split(","))
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _read_growth_csv(path: str):
    from .growth import CSV_HEADER, GrowthSample
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc}") from exc
    if not rows or ",".join(rows[0]) != CSV_HEADER:
        raise InputError(f"{path} must start with the header {CSV_HEADER!r}")
    try:
        return [GrowthSample(*(float(x) for x in row)) for row in rows[1:] if row]
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed row in {path}: {exc}") from exc


def _cmd_order_fit(args) -> int:
    from .curve import load_curve
    from .growth import fit_order_type, fit_radii, growth_samples
    from .report import write_report

    window = _pair_arg(args.window)
    if (args.input is None) == (args.curve is None):
        raise InputError("give exactly one of --input (growth CSV) or --curve")
    if args.input is not None:
        samples = _read_growth_csv(args.input)
    else:
        samples = growth_samples(load_curve(args.curve), fit_radii(*window), method="jensen",
                                 workers=resolve_workers(args.parallel))
    fit = fit_order_type(samples, window, column=args.column)
    text = write_report(fit.to_json(), args.out, "json")
    if args.out is None:
        sys.stdout.write(text)
    if args.max_order is not None and fit.order_rho > args.max_order:
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_lemma1(args) -> int:
    from .harmonic import lemma1_suite
    from .report import write_report

    rep = lemma1_suite(trials=args.trials, max_degree=args.degree, seed=args.seed,
                       workers=resolve_workers(args.parallel))
    text = write_report(rep.to_json(), args.report, "json")
    if args.report is None:
        sys.stdout.write(text)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def _cmd_main_ineq(args) -> int:
    from .curve import load_curve
    from .report import write_report
    from .verifier import OmittingCurveCase, boundary_chain_check, random_centers, sweep_main_inequality

    curve = load_curve(args.curve)
    z0 = _complex_arg(args.z0)
    r0, r1 = _pair_arg(args.annulus)
    if args.sup is not None:
        case = OmittingCurveCase(curve, z0, args.sup)
    else:
        case = OmittingCurveCase.with_scanned_sup(curve, z0, args.sup_radius, args.resolution)
    sweep = sweep_main_inequality(case, r0, r1, args.samples)
    chains = [boundary_chain_check(case, a) for a in random_centers(case, args.chain_centers, args.seed)] \
        if args.chain_centers > 0 else []
    passed = sweep.min_margin >= -args.tol and all(c.passed for c in chains)
    payload = {"z0": z0, "sup_s": case.sup_s, "sweep": sweep.to_json(),
               "chain": [c.to_json() for c in chains], "passed": passed}
    text = write_report(payload, args.out, "json")
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_VIOLATION


def _cmd_example(args) -> int:
    from .example import example_report
    from .report import write_report

    rep = example_report(args.n, args.verify, workers=resolve_workers(args.parallel))
    text = write_report(rep, args.out, "json")
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK if rep["passed"] else EXIT_VIOLATION


def _cmd_report(args) -> int:
    from .report import read_json, write_report

    if not args.inputs:
        raise InputError("no reports given")
    records = []
    for path in sorted(args.inputs):
        data = read_json(path)
        passed = data.get("passed") if isinstance(data, dict) else None
        records.append({"report": Path(path).name, "passed": "" if passed is None else str(bool(passed)).lower()})
    fmt = "csv" if args.out and args.out.lower().endswith(".csv") else "json"
    text = write_report(records, args.out, fmt)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_VIOLATION if any(r["passed"] == "false" for r in records) else EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="brody-lab", description="Numerical laboratory for Brody curves omitting hyperplanes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--parallel", type=int, default=1, help="worker threads (BRODY_LAB_THREADS overrides)")

    sp = sub.add_parser("spherical-grid", help="u and ||f'|| on a polar grid, with the sup estimate")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--radius", type=float, default=10.0)
    sp.add_argument("--resolution", type=float, default=0.1)
    sp.add_argument("--shells", type=int, default=3)
    sp.add_argument("--out", required=True, help="grid CSV")
    sp.add_argument("--summary", help="sup summary JSON (default: stdout)")
    common(sp)
    sp.set_defaults(func=_cmd_spherical_grid)

    sp = sub.add_parser("characteristic", help="characteristic table as CSV")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--radii", required=True, help="r0:r1:k, k geometric radii")
    sp.add_argument("--method", choices=("jensen", "ahlfors", "both"), default="both")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=_cmd_characteristic)

    sp = sub.add_parser("order-fit", help="order and type from a growth table or a curve")
    sp.add_argument("--input", help="CSV written by 'characteristic'")
    sp.add_argument("--curve")
    sp.add_argument("--window", required=True, help="r0,r1")
    sp.add_argument("--column", choices=("t_jensen", "t_ahlfors"), default="t_jensen")
    sp.add_argument("--max-order", type=float, help="exit 1 when the fitted order exceeds this")
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=_cmd_order_fit)

    sp = sub.add_parser("lemma1", help="gradient lemma suite on random harmonic polynomials")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--degree", type=int, default=8, help="maximum boundary degree")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--report")
    common(sp)
    sp.set_defaults(func=_cmd_lemma1)

    sp = sub.add_parser("main-ineq", help="main inequality sweep and boundary chain checks")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--z0", required=True, help="re,im of a zero of f_0")
    sp.add_argument("--annulus", required=True, help="r0,r1")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--sup", type=float, help="use this sup ||f'|| instead of scanning")
    sp.add_argument("--sup-radius", type=float, default=20.0)
    sp.add_argument("--resolution", type=float, default=0.05)
    sp.add_argument("--chain-centers", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=0.0)
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=_cmd_main_ineq)

    sp = sub.add_parser("example", help="build and verify the quadratic-growth example curve")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--verify", choices=("all", "b0", "elliptic", "brody", "growth"), default="all")
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=_cmd_example)

    sp = sub.add_parser("report", help="summarise JSON reports")
    sp.add_argument("inputs", nargs="*")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_report)
    return p


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except InputError as exc:
        print(f"brody-lab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, ReportIOError, FloatingPointError) as exc:
        print(f"brody-lab: failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
