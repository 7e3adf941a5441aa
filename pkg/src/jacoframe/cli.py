"""Command-line interface.

Commands
--------
quad build          weights for scattered points exact through a degree
quad verify         recheck a stored rule's exactness defect
quad random-points  seeded one-point-per-window node sets
quad table1         averaged construction metrics over seeded trials
frame analyze       band-pass transform of a function input
frame synth         reconstruction from a coefficients file
frame parseval      norm identity check
frame besov         local smoothness exponent from coefficient decay
kernel profile      off-diagonal kernel decay CSV

Each command prints a run report as canonical JSON on stdout (table1 prints
its CSV instead when no output file is given).  Exit codes: 0 success, 1
numerical failure, 2 input error.  Randomized commands record their seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import (
    CapacityError,
    InputError,
    InsufficientDataError,
    JacoframeError,
    NumericalError,
    ParameterError,
    SolverError,
)
from .fileio import (
    builtin_function,
    canonical_json,
    format_float,
    read_coefficients_json,
    read_function_input,
    read_points_csv,
    read_rule_json,
    write_coefficients_json,
    write_points_csv,
    write_rule_json,
)
from .frame import analyze, besov_fit, local_norms, parseval_gap, synthesize
from .jacobi import JacobiParams, build_recurrence, fourier_coeffs
from .masks import make_indicator, make_lowpass, localization_profile
from .quadrature import analyze_set, build_rule, random_points, verify_rule

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INPUT = 2

DEFAULT_MASK_ORDER = 4


@dataclass
class RunReport:
    """Stable-keyed summary of one command invocation."""

    command: str
    inputs: dict
    metrics: dict
    wall_time_seconds: float
    seed: Optional[int] = None

    def emit(self) -> None:
        payload = {
            "command": self.command,
            "inputs": self.inputs,
            "metrics": self.metrics,
            "wall_time_seconds": self.wall_time_seconds,
        }
        if self.seed is not None:
            payload["seed"] = self.seed
        sys.stdout.write(canonical_json(payload))


def _params(args) -> JacobiParams:
    return JacobiParams(alpha=args.alpha, beta=args.beta)


def _cmd_quad_build(args) -> int:
    params = _params(args)
    thetas = read_points_csv(args.points)
    sset = analyze_set(thetas)
    table = build_recurrence(params, args.degree)
    rule, _system = build_rule(
        table, sset, args.degree, cg_tol=args.cg_tol, max_iter=args.max_iter
    )
    start = time.perf_counter()
    rule.diagnostics.verify_error = verify_rule(table, rule, args.degree)
    verify_time = time.perf_counter() - start
    write_rule_json(args.out, params, rule)
    diag = rule.diagnostics
    RunReport(
        command="quad build",
        inputs={
            "alpha": params.alpha,
            "beta": params.beta,
            "points": str(args.points),
            "degree": args.degree,
            "cg_tol": args.cg_tol,
            "out": str(args.out),
        },
        metrics={
            "condition": diag.condition,
            "positive_count": diag.positive_count,
            "total_variation": diag.total_variation,
            "verify_error": diag.verify_error,
            "cg_residual": diag.cg_residual,
            "cg_iters": diag.cg_iters,
            "verify_time_seconds": verify_time,
        },
        wall_time_seconds=diag.wall_time_seconds,
    ).emit()
    return EXIT_OK


def _cmd_quad_verify(args) -> int:
    params, rule = read_rule_json(args.rule)
    degree = args.degree if args.degree is not None else rule.exactness_degree
    table = build_recurrence(params, max(degree, 1))
    start = time.perf_counter()
    error = verify_rule(table, rule, degree)
    elapsed = time.perf_counter() - start
    RunReport(
        command="quad verify",
        inputs={"rule": str(args.rule), "degree": degree},
        metrics={"verify_error": error},
        wall_time_seconds=elapsed,
    ).emit()
    return EXIT_OK


def _cmd_quad_random_points(args) -> int:
    start = time.perf_counter()
    sset = random_points(args.count, args.seed)
    elapsed = time.perf_counter() - start
    write_points_csv(args.out, sset.thetas)
    RunReport(
        command="quad random-points",
        inputs={"count": args.count, "out": str(args.out)},
        metrics={
            "mesh_norm": sset.mesh_norm,
            "separation_radius": sset.separation_radius,
            "uniformity": sset.uniformity,
        },
        wall_time_seconds=elapsed,
        seed=args.seed,
    ).emit()
    return EXIT_OK


def _table1_columns():
    return ["n", "cond", "pos", "sum_abs_w", "error", "time", "failures"]


def run_table1(
    params: JacobiParams,
    degrees: list[int],
    trials: int,
    seed: int,
    points: int,
    cg_tol: float,
) -> list[dict]:
    """Averaged construction metrics per degree over seeded trials.

    Trial t uses the point set ``random_points(points, seed + t)``, shared
    across all degrees.  Failed trials contribute NaN and are counted in the
    ``failures`` column.
    """
    table = build_recurrence(params, max(degrees) + 1)
    rows = []
    per_degree = {
        n: {"cond": [], "pos": [], "sum_abs_w": [], "error": [], "time": [], "failures": 0}
        for n in degrees
    }
    for t in range(trials):
        sset = random_points(points, seed + t)
        for n in degrees:
            acc = per_degree[n]
            try:
                rule, _ = build_rule(table, sset, n, cg_tol=cg_tol)
                err = verify_rule(table, rule, n)
            except NumericalError:
                acc["failures"] += 1
                continue
            diag = rule.diagnostics
            acc["cond"].append(diag.condition)
            acc["pos"].append(diag.positive_count)
            acc["sum_abs_w"].append(diag.total_variation)
            acc["error"].append(err)
            acc["time"].append(diag.wall_time_seconds)
    for n in degrees:
        acc = per_degree[n]
        def mean(key):
            return float(np.mean(acc[key])) if acc[key] else float("nan")
        rows.append(
            {
                "n": n,
                "cond": mean("cond"),
                "pos": mean("pos"),
                "sum_abs_w": mean("sum_abs_w"),
                "error": mean("error"),
                "time": mean("time"),
                "failures": acc["failures"],
            }
        )
    return rows


def _table1_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_table1_columns())
    for row in rows:
        writer.writerow(
            [
                row["n"],
                format_float(row["cond"]),
                format_float(row["pos"]),
                format_float(row["sum_abs_w"]),
                format_float(row["error"]),
                format_float(row["time"]),
                row["failures"],
            ]
        )
    return buf.getvalue()


def _cmd_quad_table1(args) -> int:
    if args.trials < 1:
        raise ParameterError(f"--trials must be >= 1, got {args.trials}")
    params = _params(args)
    degrees = _parse_int_list(args.degrees, "--degrees")
    start = time.perf_counter()
    rows = run_table1(params, degrees, args.trials, args.seed, args.points, args.cg_tol)
    elapsed = time.perf_counter() - start
    text = _table1_csv(rows)
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    Path(args.out).write_text(text)
    RunReport(
        command="quad table1",
        inputs={
            "alpha": params.alpha,
            "beta": params.beta,
            "degrees": degrees,
            "trials": args.trials,
            "points": args.points,
            "out": str(args.out),
        },
        metrics={"rows": len(rows), "failures": sum(r["failures"] for r in rows)},
        wall_time_seconds=elapsed,
        seed=args.seed,
    ).emit()
    return EXIT_OK


def _load_fourier(args, table, n_coeffs: int) -> np.ndarray:
    spec = read_function_input(args.input)
    if spec["kind"] == "fourier":
        coeffs = spec["coeffs"]
        if coeffs.size < n_coeffs:
            padded = np.zeros(n_coeffs)
            padded[: coeffs.size] = coeffs
            return padded
        return coeffs
    f = builtin_function(spec["builtin"])
    return fourier_coeffs(table, f, n_coeffs, oracle_degree=spec["oracle_degree"])


def _frame_table(args, n_levels: int):
    params = _params(args)
    needed = 2**n_levels + 1
    return params, build_recurrence(params, max(needed, 2 ** (n_levels + 1)))


def _cmd_frame_analyze(args) -> int:
    params, table = _frame_table(args, args.levels)
    mask = make_lowpass(args.mask_order)
    fhat = _load_fourier(args, table, 2**args.levels + 1)
    start = time.perf_counter()
    coeffs = analyze(table, mask, args.levels, fhat)
    elapsed = time.perf_counter() - start
    write_coefficients_json(args.out, coeffs)
    RunReport(
        command="frame analyze",
        inputs={
            "alpha": params.alpha,
            "beta": params.beta,
            "levels": args.levels,
            "mask_order": args.mask_order,
            "input": str(args.input),
            "out": str(args.out),
        },
        metrics={
            "num_levels": len(coeffs.levels),
            "total_coefficients": int(sum(lvl.tau.size for lvl in coeffs.levels)),
            "lowpass0": coeffs.lowpass0,
        },
        wall_time_seconds=elapsed,
    ).emit()
    return EXIT_OK


def _cmd_frame_synth(args) -> int:
    coeffs = read_coefficients_json(args.input)
    table = build_recurrence(coeffs.params, 2 ** coeffs.max_level + 1)
    mask = make_lowpass(coeffs.mask_order)
    start = time.perf_counter()
    recon = synthesize(table, mask, coeffs)
    elapsed = time.perf_counter() - start
    Path(args.out).write_text(canonical_json({"kind": "fourier", "coeffs": recon}))
    max_error = None
    if args.original is not None:
        spec = read_function_input(args.original)
        if spec["kind"] == "fourier":
            original = spec["coeffs"]
            band_limit = 2 ** (coeffs.max_level - 1)
            if original.size <= band_limit + 1 or not np.any(
                np.abs(original[band_limit + 1 :]) > 0.0
            ):
                padded = np.zeros(recon.size)
                padded[: min(original.size, recon.size)] = original[: recon.size]
                max_error = float(np.max(np.abs(recon - padded)))
    RunReport(
        command="frame synth",
        inputs={"input": str(args.input), "out": str(args.out)},
        metrics={
            "output_coefficients": recon.size,
            "max_reconstruction_error": max_error,
        },
        wall_time_seconds=elapsed,
    ).emit()
    return EXIT_OK


def _cmd_frame_parseval(args) -> int:
    params, table = _frame_table(args, args.levels)
    mask = make_lowpass(args.mask_order)
    fhat = _load_fourier(args, table, 2**args.levels + 1)
    start = time.perf_counter()
    coeffs = analyze(table, mask, args.levels, fhat)
    lhs, rhs, gap = parseval_gap(coeffs, fhat)
    elapsed = time.perf_counter() - start
    RunReport(
        command="frame parseval",
        inputs={
            "alpha": params.alpha,
            "beta": params.beta,
            "levels": args.levels,
            "mask_order": args.mask_order,
            "input": str(args.input),
        },
        metrics={"lhs": lhs, "rhs": rhs, "relative_gap": gap},
        wall_time_seconds=elapsed,
    ).emit()
    return EXIT_OK


def _cmd_frame_besov(args) -> int:
    params, table = _frame_table(args, args.levels)
    if not params.supports_localization:
        raise ParameterError(
            f"local smoothness estimation requires min(alpha, beta) >= -1/2, "
            f"got alpha={params.alpha}, beta={params.beta}"
        )
    mask = make_lowpass(args.mask_order)
    fhat = _load_fourier(args, table, 2**args.levels + 1)
    p = float("inf") if args.p == "inf" else float(int(args.p))
    start = time.perf_counter()
    coeffs = analyze(table, mask, args.levels, fhat)
    norms = local_norms(coeffs, (args.center, args.radius), p)
    estimate = besov_fit(norms, p, interval=(args.center, args.radius))
    elapsed = time.perf_counter() - start
    RunReport(
        command="frame besov",
        inputs={
            "alpha": params.alpha,
            "beta": params.beta,
            "levels": args.levels,
            "mask_order": args.mask_order,
            "input": str(args.input),
            "center": args.center,
            "radius": args.radius,
            "p": args.p,
        },
        metrics={
            "per_level_norms": norms,
            "gamma_hat": estimate.gamma_hat,
            "fit_quality": estimate.fit_quality,
            "weighted_sup": estimate.weighted_sup(),
        },
        wall_time_seconds=elapsed,
    ).emit()
    return EXIT_OK


def _cmd_kernel_profile(args) -> int:
    params = _params(args)
    table = build_recurrence(params, int(np.ceil(max(args.lam, 1.0))) + 1)
    mask = make_indicator() if args.mask == "indicator" else make_lowpass(args.mask_order)
    grid = _parse_float_list(args.grid, "--grid")
    start = time.perf_counter()
    profile = localization_profile(table, mask, args.lam, grid, samples=args.samples)
    elapsed = time.perf_counter() - start
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["delta_theta", "sup_abs_phi", "lambda", "S", "alpha", "beta"])
    for dth, sup in profile:
        writer.writerow(
            [
                format_float(dth),
                format_float(sup),
                format_float(args.lam),
                mask.order,
                format_float(params.alpha),
                format_float(params.beta),
            ]
        )
    text = buf.getvalue()
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    Path(args.out).write_text(text)
    RunReport(
        command="kernel profile",
        inputs={
            "alpha": params.alpha,
            "beta": params.beta,
            "lambda": args.lam,
            "mask": args.mask,
            "mask_order": mask.order,
            "out": str(args.out),
        },
        metrics={"rows": len(profile), "max_sup": float(np.max(profile[:, 1]))},
        wall_time_seconds=elapsed,
    ).emit()
    return EXIT_OK


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}") from exc
    if not values:
        raise InputError(f"{flag} must name at least one value")
    return values


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InputError(f"{flag} expects comma-separated numbers, got {text!r}") from exc
    if not values:
        raise InputError(f"{flag} must name at least one value")
    return values


def _add_weight_args(parser):
    parser.add_argument("--alpha", type=float, required=True, help="weight exponent at +1")
    parser.add_argument("--beta", type=float, required=True, help="weight exponent at -1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacoframe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"jacoframe {__version__}")
    parser.add_argument(
        "--json-errors",
        action="store_true",
        help="print failures as machine-readable JSON on stdout",
    )
    sub = parser.add_subparsers(dest="group", required=True)

    quad = sub.add_parser("quad", help="quadrature rules").add_subparsers(
        dest="command", required=True
    )
    p = quad.add_parser("build", help="build weights for scattered points")
    _add_weight_args(p)
    p.add_argument("--points", required=True, help="points CSV (header 'theta' or 'x')")
    p.add_argument("--degree", type=int, required=True, help="requested exactness degree")
    p.add_argument("--cg-tol", type=float, default=1e-14, help="CG relative residual target")
    p.add_argument("--max-iter", type=int, default=None, help="CG iteration cap")
    p.add_argument("--out", default="rule.json", help="rule output path")
    p.set_defaults(func=_cmd_quad_build)

    p = quad.add_parser("verify", help="recheck a stored rule")
    p.add_argument("--rule", required=True, help="rule JSON path")
    p.add_argument("--degree", type=int, default=None, help="override the stored degree")
    p.set_defaults(func=_cmd_quad_verify)

    p = quad.add_parser("random-points", help="seeded random node set")
    p.add_argument("--count", type=int, required=True, help="number of points")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--out", default="points.csv", help="points CSV output path")
    p.set_defaults(func=_cmd_quad_random_points)

    p = quad.add_parser("table1", help="averaged metrics over seeded trials")
    _add_weight_args(p)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0, help="base seed; trial t uses seed + t")
    p.add_argument("--degrees", default="256,512,768,896,1023")
    p.add_argument("--points", type=int, default=1024, help="points per trial")
    p.add_argument("--cg-tol", type=float, default=1e-14)
    p.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    p.set_defaults(func=_cmd_quad_table1)

    frame = sub.add_parser("frame", help="band-pass transform").add_subparsers(
        dest="command", required=True
    )
    for name, func, extra in (
        ("analyze", _cmd_frame_analyze, "out"),
        ("parseval", _cmd_frame_parseval, None),
        ("besov", _cmd_frame_besov, "besov"),
    ):
        p = frame.add_parser(name)
        _add_weight_args(p)
        p.add_argument("--levels", type=int, required=True, help="deepest dyadic level N")
        p.add_argument("--mask-order", type=int, default=DEFAULT_MASK_ORDER)
        p.add_argument("--input", required=True, help="function input JSON")
        if extra == "out":
            p.add_argument("--out", default="coefficients.json")
        if extra == "besov":
            p.add_argument("--center", type=float, required=True)
            p.add_argument("--radius", type=float, required=True)
            p.add_argument("--p", choices=["1", "2", "inf"], default="inf")
        p.set_defaults(func=func)

    p = frame.add_parser("synth")
    p.add_argument("--input", required=True, help="coefficients JSON")
    p.add_argument("--out", default="reconstruction.json")
    p.add_argument(
        "--original",
        default=None,
        help="function input to compare against (fourier kind, band-limited)",
    )
    p.set_defaults(func=_cmd_frame_synth)

    kernel = sub.add_parser("kernel", help="kernel diagnostics").add_subparsers(
        dest="command", required=True
    )
    p = kernel.add_parser("profile", help="off-diagonal decay CSV")
    _add_weight_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True, help="bandwidth")
    p.add_argument("--mask-order", type=int, default=DEFAULT_MASK_ORDER)
    p.add_argument("--mask", choices=["lowpass", "indicator"], default="lowpass")
    p.add_argument("--grid", required=True, help="comma-separated angle offsets")
    p.add_argument("--samples", type=int, default=None, help="base-angle grid size")
    p.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    p.set_defaults(func=_cmd_kernel_profile)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParameterError, CapacityError, InsufficientDataError) as exc:
        return _fail(args, exc, EXIT_INPUT)
    except NumericalError as exc:
        return _fail(args, exc, EXIT_NUMERICAL)


def _fail(args, exc: JacoframeError, code: int) -> int:
    if getattr(args, "json_errors", False):
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        if isinstance(exc, SolverError) and exc.residual_history:
            payload["residual_history_tail"] = exc.residual_history[-5:]
        sys.stdout.write(canonical_json(payload))
    else:
        print(f"jacoframe: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
