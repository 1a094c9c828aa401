"""Command-line front end.

    spintomo <command> [options]

Commands: validate, tomogram, reconstruct, map, correlation, steering,
selftest. States come either from a matrix JSON file or from the builtin
grammar ``werner:<p>``. Exit codes: 0 success, 1 check failure, 2
usage/parse error. Set SPINTOMO_LOG to error|info|debug for diagnostics on
stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from math import isfinite

import numpy as np

from . import frames, kernel, selftest, steering
from .matcore import (
    BASIS_QUDIT,
    BASIS_TWO_QUBIT,
    DensityMatrix,
    matrix_from_json_dict,
    matrix_to_json_dict,
    validate_density,
    werner,
    werner_matrix,
)
from .su2 import EulerAngles, as_direction

log = logging.getLogger("spintomo")

REP_TO_BASIS = {"two_qubit": BASIS_TWO_QUBIT, "qudit": BASIS_QUDIT}

_AXIS_ALIASES = {
    "x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0),
    "-x": (-1.0, 0.0, 0.0), "-y": (0.0, -1.0, 0.0), "-z": (0.0, 0.0, -1.0),
}


class CliError(Exception):
    """Usage or parse problem; maps to exit code 2."""


def _setup_logging() -> None:
    level = os.environ.get("SPINTOMO_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        level = "error"
    logging.basicConfig(level=levels[level], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _parse_state(spec: str, enforce_domain: bool = True):
    """Return (matrix, basis tag or None, werner parameter or None)."""
    if spec is None:
        raise CliError("--state is required")
    if spec.startswith("werner:"):
        try:
            p = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise CliError(f"cannot parse werner parameter in {spec!r}") from exc
        if not isfinite(p):
            raise CliError("werner parameter must be finite")
        if enforce_domain:
            try:
                state = werner(p)
            except ValueError as exc:
                raise CliError(str(exc)) from exc
            return state.mat, None, p
        return werner_matrix(p), None, p
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read state file {spec!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"state file {spec!r} is not valid JSON: {exc}") from exc
    try:
        mat, basis = matrix_from_json_dict(payload)
    except ValueError as exc:
        raise CliError(f"bad matrix JSON in {spec!r}: {exc}") from exc
    return mat, basis, None


def _density(mat, basis) -> DensityMatrix:
    try:
        return DensityMatrix(mat, basis)
    except ValueError as exc:
        raise CliError(f"input is not a valid density matrix: {exc}") from exc


def _parse_direction(spec: str) -> np.ndarray:
    if spec in _AXIS_ALIASES:
        return np.array(_AXIS_ALIASES[spec])
    parts = spec.split(",")
    if len(parts) != 3:
        raise CliError(f"direction {spec!r} must be x|y|z or three comma-separated numbers")
    try:
        v = np.array([float(x) for x in parts])
    except ValueError as exc:
        raise CliError(f"cannot parse direction {spec!r}") from exc
    try:
        return as_direction(v)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _make_grids(args, spheres_needed):
    try:
        return {
            n: frames.make_grid(args.grid_azimuth, args.grid_polar, spheres=n)
            for n in spheres_needed
        }
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _emit(args, payload) -> None:
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(args, names) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise CliError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _angles(azimuth, polar, third) -> EulerAngles:
    try:
        return EulerAngles(azimuth, polar, third if third is not None else 0.0)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


# --------------------------------------------------------------------------
# command handlers

def cmd_validate(args) -> int:
    # builtin werner states skip the domain check here on purpose: the whole
    # point of `validate werner:1.5` is to watch the PSD check fail
    mat, _, _ = _parse_state(args.state, enforce_domain=False)
    report = validate_density(mat, tol=args.tol if args.tol else 1e-12)
    _emit(args, report.as_dict())
    return 0 if report.passed else 1


def _tomogram_point(args, rep):
    if rep == "qudit":
        _require(args, ("m", "alpha", "beta"))
        return frames.FramePointQudit(args.m, _angles(args.alpha, args.beta, args.gamma))
    _require(args, ("m1", "m2", "theta1", "phi1", "theta2", "phi2"))
    return frames.FramePoint2Q(
        args.m1, args.m2,
        _angles(args.phi1, args.theta1, args.psi1),
        _angles(args.phi2, args.theta2, args.psi2),
    )


def cmd_tomogram(args) -> int:
    mat, basis, _ = _parse_state(args.state)
    state = _density(mat, basis)
    rep = args.rep
    try:
        if args.full_grid:
            spheres = 1 if rep == "qudit" else 2
            grid = _make_grids(args, (spheres,))[spheres]
            table = frames.tomogram_table(state, REP_TO_BASIS[rep], grid)
            if args.format == "csv":
                _emit(args, table.to_csv_string())
            else:
                _emit(args, {
                    "representation": table.representation,
                    "columns": list(table.columns),
                    "rows": [[float(x) for x in row] for row in table.rows],
                })
            return 0
        point = _tomogram_point(args, rep)
        value = frames.tomogram(state, point)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if rep == "qudit":
        payload = {"representation": BASIS_QUDIT, "m": args.m,
                   "alpha": args.alpha, "beta": args.beta, "value": value}
    else:
        payload = {"representation": BASIS_TWO_QUBIT,
                   "m1": args.m1, "m2": args.m2,
                   "theta1": args.theta1, "phi1": args.phi1,
                   "theta2": args.theta2, "phi2": args.phi2, "value": value}
    _emit(args, payload)
    return 0


def cmd_reconstruct(args) -> int:
    mat, basis, _ = _parse_state(args.state)
    state = _density(mat, basis)
    rep = args.rep
    spheres = 1 if rep == "qudit" else 2
    grid = _make_grids(args, (spheres,))[spheres]
    try:
        rec = frames.reconstruct_state(state, REP_TO_BASIS[rep], grid)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    residual = float(np.linalg.norm(rec - mat))
    tol = args.tol if args.tol else 1e-8
    payload = {
        "matrix": matrix_to_json_dict(rec, basis=REP_TO_BASIS[rep]),
        "residual": residual,
        "tolerance": tol,
    }
    if rep == "qudit":
        authority = frames.qudit_quantizer_authority(grid.n_azimuth, grid.n_polar)
        payload["quantizer_report"] = authority.report.as_dict()
    _emit(args, payload)
    return 0 if residual <= tol else 1


def cmd_map(args) -> int:
    mat, _, _ = _parse_state(args.state)
    state = _density(mat, None)
    grids = _make_grids(args, (1, 2))
    try:
        if args.direction == "qudit_to_2q":
            target = _tomogram_point(args, "two_qubit")
            mapped = kernel.map_state_qudit_to_two_qubit(state, grids[1], target)
        elif args.direction == "2q_to_qudit":
            target = _tomogram_point(args, "qudit")
            mapped = kernel.map_state_two_qubit_to_qudit(state, grids[2], target)
        else:
            raise CliError("--direction must be qudit_to_2q or 2q_to_qudit")
        direct = frames.tomogram(mat, target)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    residual = abs(mapped - direct)
    tol = args.tol if args.tol else 1e-8
    _emit(args, {"direction": args.direction, "value": mapped,
                 "direct": direct, "residual": residual, "tolerance": tol})
    return 0 if residual <= tol else 1


def cmd_correlation(args) -> int:
    mat, _, _ = _parse_state(args.state)
    state = _density(mat, None)
    k1 = _parse_direction(args.k1) if args.k1 else np.array([0.0, 0.0, 1.0])
    k2 = _parse_direction(args.k2) if args.k2 else np.array([0.0, 0.0, 1.0])
    grids = _make_grids(args, (1, 2))
    forms = steering.correlation_forms(state, k1, k2, grids[2], grids[1])
    spread = max(abs(x - y) for x in forms.values() for y in forms.values())
    _emit(args, {"k1": [float(x) for x in k1], "k2": [float(x) for x in k2],
                 "forms": forms, "max_pairwise_deviation": spread})
    return 0


def cmd_steering(args) -> int:
    mat, _, p = _parse_state(args.state)
    state = _density(mat, None)
    k1 = _parse_direction(args.k1) if args.k1 else np.array([0.0, 0.0, 1.0])
    k2 = _parse_direction(args.k2) if args.k2 else np.array([0.0, 0.0, 1.0])
    grids = _make_grids(args, (1, 2))
    report = steering.steering_check(state, k1, k2, grids[2], grids[1], p=p)
    _emit(args, report.as_dict())
    return 0


def cmd_selftest(args) -> int:
    report = selftest.run_selftest(
        n_azimuth=args.grid_azimuth, n_polar=args.grid_polar,
        seed=args.seed, coarse=args.coarse,
    )
    for result in report.results:
        sys.stdout.write(result.line() + "\n")
        sys.stderr.write(f"  criterion {result.index} took {result.seconds:.2f} s\n")
    overall = "PASS" if report.all_passed else "FAIL"
    sys.stdout.write(f"selftest: {overall}\n")
    sys.stderr.write(f"selftest wall clock {report.wall_clock_seconds:.2f} s\n")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.all_passed else 1


# --------------------------------------------------------------------------
# parser

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", help="matrix JSON file or builtin 'werner:<p>'")
    parser.add_argument("--grid-azimuth", type=int, default=frames.MIN_AZIMUTH_NODES,
                        help="azimuth nodes per sphere (>= 8)")
    parser.add_argument("--grid-polar", type=int, default=frames.MIN_POLAR_NODES,
                        help="polar Gauss-Legendre nodes per sphere (>= 8)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", help="write output to this path instead of stdout")
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--tol", type=float, default=None,
                        help="tolerance override for pass/fail exit codes")


def _add_point_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=float, help="qudit projection (1.5, 0.5, -0.5, -1.5)")
    parser.add_argument("--alpha", type=float, help="qudit azimuth angle (rad)")
    parser.add_argument("--beta", type=float, help="qudit polar angle (rad)")
    parser.add_argument("--gamma", type=float, help="qudit third angle (rad, no effect)")
    parser.add_argument("--m1", type=float, help="first qubit projection (+-0.5)")
    parser.add_argument("--m2", type=float, help="second qubit projection (+-0.5)")
    parser.add_argument("--theta1", type=float, help="first qubit polar angle (rad)")
    parser.add_argument("--phi1", type=float, help="first qubit azimuth (rad)")
    parser.add_argument("--psi1", type=float, help="first qubit third angle (rad, no effect)")
    parser.add_argument("--theta2", type=float, help="second qubit polar angle (rad)")
    parser.add_argument("--phi2", type=float, help="second qubit azimuth (rad)")
    parser.add_argument("--psi2", type=float, help="second qubit third angle (rad, no effect)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spintomo",
        description="Spin tomographic representations, kernels and steering analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a state against the density-matrix axioms")
    _add_common(p)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("tomogram", help="evaluate a tomogram at a point or over the grid")
    _add_common(p)
    p.add_argument("--rep", choices=("two_qubit", "qudit"), required=True)
    p.add_argument("--full-grid", action="store_true",
                   help="emit the full (projection, node) table")
    _add_point_flags(p)
    p.set_defaults(handler=cmd_tomogram)

    p = sub.add_parser("reconstruct", help="round-trip a state through its tomogram")
    _add_common(p)
    p.add_argument("--rep", choices=("two_qubit", "qudit"), required=True)
    p.set_defaults(handler=cmd_reconstruct)

    p = sub.add_parser("map", help="convert a tomogram between the two pictures")
    _add_common(p)
    p.add_argument("--direction", choices=("qudit_to_2q", "2q_to_qudit"), required=True)
    _add_point_flags(p)
    p.set_defaults(handler=cmd_map)

    p = sub.add_parser("correlation", help="all four correlation-function forms")
    _add_common(p)
    p.add_argument("--k1", help="first direction: x|y|z or 'a,b,c'")
    p.add_argument("--k2", help="second direction")
    p.set_defaults(handler=cmd_correlation)

    p = sub.add_parser("steering", help="steering inequality and CHSH report")
    _add_common(p)
    p.add_argument("--k1", help="direction for the correlation forms (default z)")
    p.add_argument("--k2", help="direction for the correlation forms (default z)")
    p.set_defaults(handler=cmd_steering)

    p = sub.add_parser("selftest", help="run the full acceptance suite")
    _add_common(p)
    p.add_argument("--coarse", action="store_true",
                   help="degrade the grid to demonstrate reconstruction failure")
    p.set_defaults(handler=cmd_selftest)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    log.info("command %s, grid (%s, %s)", args.command,
             getattr(args, "grid_azimuth", "-"), getattr(args, "grid_polar", "-"))
    try:
        code = args.handler(args)
        log.debug("command %s finished with exit code %d", args.command, code)
        return code
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
