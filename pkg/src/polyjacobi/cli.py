"""Command line interface: ``polyjacobi <subcommand> ...``.

Exit statuses: 0 pass, 1 bound failure, 2 configuration error (including
violated hypotheses), 3 finite sections did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from itertools import product

import numpy as np

from . import bounds
from .config import ConfigError, load_config
from .harness import RandomInstanceSpec, run_suite
from .operators import SIGMA_CAP, laplacian_stencil, omegas, symbol, symbol_closed_form
from .spectrum import DEFAULT_TOLERANCE, discrete_spectrum

log = logging.getLogger("polyjacobi")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3
VERIFY_COLUMNS = ["theorem", "sigma", "gamma", "lhs", "rhs", "ratio", "constant",
                  "converged", "status", "instance_digest"]


def fmt(value) -> str:
    """Locale-free cell formatting; floats with 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def write_csv(rows, header, out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    emit(buf.getvalue(), out)


def emit(text: str, out) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sigma(value: str) -> int:
    s = int(value)
    if not 1 <= s <= SIGMA_CAP:
        raise argparse.ArgumentTypeError(f"sigma must lie in 1..{SIGMA_CAP}")
    return s


def _float_list(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}") from None


def _sigma_list(value: str) -> list[int]:
    return [_sigma(v) for v in value.split(",") if v]


# ---------------------------------------------------------------------------
# subcommands


def cmd_stencil(args) -> int:
    coeffs = laplacian_stencil(args.sigma).coeffs
    text = (f"sigma {args.sigma}\n"
            f"stencil {' '.join(str(c) for c in coeffs)}\n"
            f"omegas {' '.join(str(w) for w in omegas(args.sigma))}\n")
    emit(text, args.out)
    return EXIT_OK


def cmd_symbol(args) -> int:
    if args.samples < 2:
        log.error("--samples must be at least 2")
        return EXIT_CONFIG
    x = np.linspace(-np.pi, np.pi, args.samples)
    s = symbol(args.sigma, x)
    c = symbol_closed_form(args.sigma, x)
    diff = np.abs(s - c)
    rows = [(float(a), float(b), float(d), float(e)) for a, b, d, e in zip(x, s, c, diff)]
    rows.append(("max_abs_diff", "", "", float(diff.max())))
    write_csv(rows, ["x", "symbol", "closed_form", "abs_diff"], args.out)
    return EXIT_OK


def _load(args):
    cfg = load_config(args.config)
    tol = args.tolerance if args.tolerance is not None else cfg.tolerance
    return cfg, DEFAULT_TOLERANCE if tol is None else tol


def cmd_spectrum(args) -> int:
    cfg, tol = _load(args)
    report = discrete_spectrum(cfg.coefficients(), cfg.operator, tolerance=tol,
                               edge_margin=cfg.edge_margin)
    emit(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if report.converged else EXIT_CONVERGENCE


def _exit_status(reports) -> int:
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        return EXIT_FAIL
    if "domain_error" in statuses:
        return EXIT_CONFIG
    if "indeterminate" in statuses:
        return EXIT_CONVERGENCE
    return EXIT_OK


def _reports(cfg, tol, sigma, gammas, scale):
    coeffs = cfg.coefficients(sigma, scale)
    out = []
    for theorem in cfg.theorems:
        out.extend(bounds.verify_bounds(theorem, coeffs, gammas, tolerance=tol,
                                        edge_margin=cfg.edge_margin))
    return out


def _row(r: bounds.BoundReport) -> list:
    return [r.theorem, r.sigma, r.gamma, r.lhs, r.rhs, r.ratio, r.constant,
            r.converged, r.status, r.instance_digest]


def cmd_verify(args) -> int:
    cfg, tol = _load(args)
    gammas = args.gamma or cfg.gammas
    reports = _reports(cfg, tol, cfg.sigma, gammas, 1.0)
    for r in reports:
        if r.status == "domain_error":
            log.warning("%s gamma=%s: %s", r.theorem, fmt(r.gamma), r.detail)
    write_csv([_row(r) for r in reports], VERIFY_COLUMNS, args.out)
    return _exit_status(reports)


def cmd_sweep(args) -> int:
    cfg, tol = _load(args)
    sigmas = args.sigma or [cfg.sigma]
    gammas = args.gamma or list(cfg.gammas)
    scales = args.scale or [1.0]
    keyed = []
    for sigma, scale in product(sigmas, scales):
        for r in _reports(cfg, tol, sigma, gammas, scale):
            keyed.append(((sigma, r.gamma, scale, r.theorem), r))
    keyed.sort(key=lambda item: item[0])
    rows = []
    for (_, _, scale, _), r in keyed:
        row = _row(r)
        rows.append(row[:3] + [scale] + row[3:])
    header = VERIFY_COLUMNS[:3] + ["scale"] + VERIFY_COLUMNS[3:]
    write_csv(rows, header, args.out)
    return _exit_status([r for _, r in keyed])


def cmd_selftest(args) -> int:
    if args.count < 0:
        log.error("--count must be nonnegative")
        return EXIT_CONFIG
    spec = RandomInstanceSpec(seed=args.seed, count=args.count)
    report = run_suite(spec, inject_fault=args.inject_fault)
    emit(report.summary(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyjacobi",
        description="Eigenvalue moment checks for higher-order lattice Schroedinger operators "
                    "and polydiagonal Jacobi-type matrices.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    p = add("stencil", cmd_stencil, "print the exact stencil and off-diagonal coefficients")
    p.add_argument("--sigma", type=_sigma, required=True)

    p = add("symbol", cmd_symbol, "tabulate the Fourier symbol against its closed form")
    p.add_argument("--sigma", type=_sigma, required=True)
    p.add_argument("--samples", type=int, default=101)

    for name, func, help_ in (("spectrum", cmd_spectrum, "discrete spectrum of a configured instance (JSON)"),
                              ("verify", cmd_verify, "check the eigenvalue bounds for a configured instance"),
                              ("sweep", cmd_sweep, "check the bounds over a (sigma, gamma, scale) grid")):
        p = add(name, func, help_)
        p.add_argument("--config", required=True, help="instance JSON file")
        p.add_argument("--tolerance", type=float, help="window-doubling convergence tolerance")
        if name != "spectrum":
            p.add_argument("--gamma", type=_float_list, help="comma-separated moments, overrides config")
        if name == "sweep":
            p.add_argument("--sigma", type=_sigma_list, help="comma-separated orders")
            p.add_argument("--scale", type=_float_list, help="comma-separated amplitude factors")

    p = add("selftest", cmd_selftest, "seeded randomized verification suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
