"""Command-line entry point.

Subcommands::

    affinekit run <scenario.json> [--out DIR]
    affinekit check <suite>                  # invariance | brackets | measures
                                             # | legendre | qdesk
    affinekit spectrum --alpha A --potential SPEC --qmin Q0 --qmax Q1
                       --points M --levels K [--hbar H] [--out DIR]
    affinekit measure-check [--n N] [--points P] [--seed S]

Exit codes: 0 success, 1 failed checks or runtime error, 2 aborted run
(partial artifacts flagged in the summary), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

EX_USAGE = 64


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _cmd_run(args) -> int:
    from .runner import run
    from .scenario import parse_scenario

    scenario = parse_scenario(args.scenario)
    out_dir = args.out or scenario.out_dir or "out"
    start = time.perf_counter()
    summary = run(scenario, out_dir)
    wall = time.perf_counter() - start
    # wall time goes to stderr only: artifacts stay byte-reproducible
    print(f"run finished in {wall:.3f} s; artifacts in {out_dir}", file=sys.stderr)
    _print_json(summary)
    return int(summary["exit_code"])


def _cmd_check(args) -> int:
    from .checks import SUITES, run_suite

    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}",
              file=sys.stderr)
        return EX_USAGE
    report = run_suite(args.suite)
    _print_json(report)
    return 0 if report["passed"] else 1


def _parse_potential(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "zero":
        return lambda q: np.zeros_like(q)
    if kind == "harmonic":
        k = float(rest) if rest else 1.0
        return lambda q: 0.5 * k * q * q
    if kind == "poly":
        coeffs = [float(c) for c in rest.split(",")] if rest else [0.0]
        return lambda q: sum(c * q ** j for j, c in enumerate(coeffs))
    raise ValueError(f"unknown potential spec {spec!r}; use zero, harmonic:K or poly:c0,c1,...")


def _cmd_spectrum(args) -> int:
    import os

    from . import qdesk

    try:
        V = _parse_potential(args.potential)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EX_USAGE
    grid = qdesk.QGrid(q_min=args.qmin, q_max=args.qmax, m=args.points,
                       hbar=args.hbar, alpha_eff=args.alpha)
    op = qdesk.build_hamiltonian_1d(grid, V)
    energies, states = qdesk.solve_spectrum(op, args.levels)
    defects = {
        "sigma_haar": qdesk.hermiticity_check(grid, "Sigma", "haar"),
        "sigma_corrected_lebesgue": qdesk.hermiticity_check(grid, "Sigma_corrected",
                                                            "lebesgue"),
        "momentum_p_lebesgue": qdesk.hermiticity_check(grid, "momentum_p", "lebesgue"),
    }
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "rho.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("q," + ",".join(f"rho_{j}" for j in range(args.levels)) + "\n")
        rhos = [qdesk.invariant_distribution(psi) for psi in states]
        for i, q in enumerate(grid.q):
            row = [q] + [rho[i] for rho in rhos]
            fh.write(",".join(f"{v:.17e}" for v in row) + "\n")
    print(f"density CSV written to {csv_path}", file=sys.stderr)
    _print_json({"levels": [float(e) for e in energies], "defects": defects})
    return 0


def _cmd_measure_check(args) -> int:
    from .measures import measure_check_report

    report = measure_check_report(args.n, points=args.points, seed=args.seed)
    _print_json(report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affinekit",
                                     description="affine-body dynamics toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario file")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    p_run.add_argument("--out", default="",
                       help="output directory (default: the scenario's output.dir, else ./out)")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="run a verification suite")
    p_check.add_argument("suite", help="suite name")
    p_check.set_defaults(func=_cmd_check)

    p_spec = sub.add_parser("spectrum", help="1-d spectral problem in q = ln phi")
    p_spec.add_argument("--alpha", type=float, default=1.0,
                        help="effective inertia I + A + B")
    p_spec.add_argument("--potential", default="harmonic:1.0",
                        help="zero | harmonic:K | poly:c0,c1,...")
    p_spec.add_argument("--qmin", type=float, default=-10.0)
    p_spec.add_argument("--qmax", type=float, default=10.0)
    p_spec.add_argument("--points", type=int, default=4000)
    p_spec.add_argument("--levels", type=int, default=5)
    p_spec.add_argument("--hbar", type=float, default=1.0)
    p_spec.add_argument("--out", default="out", help="directory for the density CSV")
    p_spec.set_defaults(func=_cmd_spectrum)

    p_meas = sub.add_parser("measure-check", help="two-polar density oracle report")
    p_meas.add_argument("--n", type=int, default=2)
    p_meas.add_argument("--points", type=int, default=100)
    p_meas.add_argument("--seed", type=int, default=0)
    p_meas.set_defaults(func=_cmd_measure_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface library errors as clean CLI failures
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
