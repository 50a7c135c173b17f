"""Command-line interface.

Subcommands: orbit, build-state, converge, cross-terms, microlocal, suites.
All tabular output is CSV with comment headers (version, config hash, seed);
reruns with the same inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .fock import reference_state
from .harness import (
    SuitesConfig,
    config_hash,
    converge_report,
    cross_term_report,
    parse_config,
    run_suites,
    suites_report_csv,
    _fmt,
)
from .measures import ConvexMeasure, TestFamily, load_measure
from .symplectic import PhasePoint, random_orbit_pair, transporter
from .weyl import BumpSymbol, microlocal_norm


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _family(arg: str, dim: int) -> TestFamily:
    if arg is None or arg == "default":
        return TestFamily.graded(dim, max_half=2)
    if arg.startswith("graded"):
        return TestFamily.graded(dim, max_half=int(arg.removeprefix("graded")))
    raise SystemExit(f"unknown family {arg!r} (use 'default' or 'graded<k>')")


def _measure_from_args(args) -> ConvexMeasure:
    if args.measure:
        return load_measure(args.measure)
    if args.dim == 1:
        from .symplectic import reference_orbit
        return ConvexMeasure.single(reference_orbit(1))
    rng = np.random.default_rng(args.seed)
    oa, ob = random_orbit_pair(args.dim, rng)
    return ConvexMeasure.mixture([0.3, 0.7], [oa, ob])


def _n_list(arg: str):
    return tuple(int(x) for x in arg.split(","))


def cmd_orbit(args):
    mu = _measure_from_args(args)
    lines = [f"# osclab-version: {__version__}",
             "component,weight,generator_x,generator_xi,transporter_column,orbit_ok"]
    for i, (w, m) in enumerate(mu.components):
        g = transporter(m.orbit)
        col = g.unitary[:, 0]
        ok = bool(abs(abs(np.vdot(m.orbit.w0, col)) - 1.0) <= 1e-10)
        gx = " ".join(_fmt(v) for v in m.orbit.generator.x)
        gxi = " ".join(_fmt(v) for v in m.orbit.generator.xi)
        ucol = " ".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in col)
        lines.append(f"{i},{_fmt(w)},{gx},{gxi},{ucol},{ok}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_build_state(args):
    mu = _measure_from_args(args)
    from .harness import build_state_diagnostics
    state, raw = build_state_diagnostics(mu, args.n)
    lines = [f"# osclab-version: {__version__}",
             f"# hbar: {_fmt(state.hbar)}",
             f"# raw-combination-norm: {_fmt(raw)}",
             "alpha,re,im"]
    for alpha in sorted(state.coeffs):
        c = state.coeffs[alpha]
        lines.append(" ".join(str(a) for a in alpha) + f",{_fmt(c.real)},{_fmt(c.imag)}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_converge(args):
    mu = _measure_from_args(args)
    family = _family(args.family, mu.dim)
    report = converge_report(mu, family, _n_list(args.n_list),
                             metadata={"seed": args.seed})
    _write(args.out, report.to_csv())
    failures = report.check(final_tol=args.tol)
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return 1 if failures else 0


def cmd_cross_terms(args):
    if args.measure:
        mu = load_measure(args.measure)
        if len(mu.components) < 2:
            raise SystemExit("cross-terms needs a measure with at least two components")
        oa, ob = mu.components[0][1].orbit, mu.components[1][1].orbit
    else:
        rng = np.random.default_rng(args.seed)
        oa, ob = random_orbit_pair(args.dim, rng)
    family = _family(args.family, oa.dim)
    report = cross_term_report(oa, ob, family, _n_list(args.n_list),
                               metadata={"seed": args.seed})
    _write(args.out, report.to_csv())
    failures = report.check(final_tol=args.tol)
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return 1 if failures else 0


def cmd_microlocal(args):
    lines = [f"# osclab-version: {__version__}", "center,width,n,norm_estimate"]
    for center_norm in (0.0, 2.0):
        for n in _n_list(args.n_list):
            u = reference_state(n, 1)
            bump = BumpSymbol(PhasePoint(np.array([center_norm]), np.array([0.0])), 0.2)
            val = microlocal_norm(bump, u)
            lines.append(f"{_fmt(center_norm)},0.2,{n},{_fmt(val)}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_suites(args):
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
        if args.seed is not None:
            from dataclasses import replace
            cfg = replace(cfg, seed=args.seed)
    else:
        cfg = SuitesConfig(dim=args.dim, seed=args.seed or 0)
    status, results = run_suites(cfg)
    _write(args.out, suites_report_csv(cfg, results))
    if status != 0:
        for r in results:
            if not r.passed:
                print(f"FAIL {r.suite}/{r.check}: value {r.value:.3e} "
                      f"threshold {r.threshold:.3e} {r.detail}", file=sys.stderr)
    else:
        print(f"all suites pass (config {config_hash(cfg)})", file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="osclab",
        description="eigenfunction sequences for invariant measures on the energy sphere")
    parser.add_argument("--version", action="version", version=f"osclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default="8,16,32,64,128"):
        p.add_argument("--measure", help="measure description file")
        p.add_argument("--dim", type=int, default=2, help="dimension d (used when random)")
        p.add_argument("--n-list", default=n_default, help="comma-separated levels")
        p.add_argument("--family", default="default", help="symbol family (default|graded<k>)")
        p.add_argument("--seed", type=int, default=0, help="seed for random inputs")
        p.add_argument("--out", help="output CSV path (default stdout)")
        p.add_argument("--tol", type=float, default=None, help="final-error tolerance")

    p = sub.add_parser("orbit", help="print and validate orbits and transporters")
    common(p)
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("build-state", help="emit Fock coefficients of the built state")
    common(p)
    p.add_argument("--n", type=int, default=32, help="eigenstate level")
    p.set_defaults(fn=cmd_build_state)

    p = sub.add_parser("converge", help="convergence report against the target measure")
    common(p)
    p.set_defaults(fn=cmd_converge, tol_default=5e-2)

    p = sub.add_parser("cross-terms", help="cross-term decay for an orbit pair")
    common(p)
    p.set_defaults(fn=cmd_cross_terms, tol_default=1e-2)

    p = sub.add_parser("microlocal", help="bump-symbol decay on eigenstates (d=1)")
    common(p, n_default="8,16,32,64")
    p.set_defaults(fn=cmd_microlocal)

    p = sub.add_parser("suites", help="run every property suite")
    p.add_argument("--config", help="suites config file")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(fn=cmd_suites)

    args = parser.parse_args(argv)
    if getattr(args, "tol", None) is None and hasattr(args, "tol_default"):
        args.tol = args.tol_default
    elif getattr(args, "tol", None) is None:
        args.tol = 5e-2
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
