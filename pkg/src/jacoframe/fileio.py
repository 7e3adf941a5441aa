"""File formats: points CSV, rule JSON, coefficients JSON, function inputs.

JSON is written with sorted keys and Python's shortest round-trip float
representation, so identical data produces identical bytes.  CSV numbers are
formatted with 17 significant digits.  Non-finite floats serialize as null.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import InputError
from .frame import FrameCoefficients, FrameLevel
from .jacobi import DiscreteMeasure, JacobiParams, RuleDiagnostics

__all__ = [
    "read_points_csv",
    "write_points_csv",
    "write_rule_json",
    "read_rule_json",
    "write_coefficients_json",
    "read_coefficients_json",
    "read_function_input",
    "builtin_function",
    "canonical_json",
    "format_float",
]

BUILTIN_FUNCTIONS = ("abs_x", "step", "runge")


def format_float(value: float) -> str:
    """17-significant-digit decimal form used in CSV output."""
    return f"{value:.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(float(v)) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ": ")) + "\n"


def read_points_csv(path) -> np.ndarray:
    """Angles from a one-column CSV with header ``theta`` or ``x``.

    ``theta`` values must lie in (0, pi); ``x`` values in (-1, 1) and are
    converted through arccos.  Errors name the offending line.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read points file {path}: {exc}") from exc
    rows = [row for row in csv.reader(lines)]
    if not rows or not rows[0]:
        raise InputError("line 1: expected header 'theta' or 'x'")
    header = rows[0][0].strip().lower()
    if header not in ("theta", "x"):
        raise InputError(f"line 1: expected header 'theta' or 'x', got {rows[0][0]!r}")
    values = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 1:
            raise InputError(f"line {i}: expected a single value, got {len(row)} fields")
        try:
            values.append(float(row[0]))
        except ValueError as exc:
            raise InputError(f"line {i}: could not parse {row[0]!r} as a number") from exc
    values = np.asarray(values, dtype=float)
    if header == "x":
        bad = np.where((values <= -1.0) | (values >= 1.0))[0]
        if bad.size:
            i = int(bad[0])
            raise InputError(f"line {i + 2}: x = {values[i]!r} outside (-1, 1)")
        values = np.arccos(values)
    return values


def write_points_csv(path, thetas: np.ndarray) -> None:
    lines = ["theta"] + [format_float(float(t)) for t in np.asarray(thetas)]
    Path(path).write_text("\n".join(lines) + "\n")


def _diagnostics_dict(diag: RuleDiagnostics | None) -> dict:
    if diag is None:
        diag = RuleDiagnostics()
    return {
        "condition": diag.condition,
        "positive_count": diag.positive_count,
        "total_variation": diag.total_variation,
        "verify_error": diag.verify_error,
        "cg_residual": diag.cg_residual,
        "cg_iters": diag.cg_iters,
        "wall_time_seconds": diag.wall_time_seconds,
    }


def write_rule_json(path, params: JacobiParams, rule: DiscreteMeasure) -> None:
    payload = {
        "alpha": params.alpha,
        "beta": params.beta,
        "degree": rule.exactness_degree,
        "nodes": rule.nodes,
        "weights": rule.masses,
        "diagnostics": _diagnostics_dict(rule.diagnostics),
    }
    Path(path).write_text(canonical_json(payload))


def read_rule_json(path) -> tuple[JacobiParams, DiscreteMeasure]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read rule file {path}: {exc}") from exc
    try:
        params = JacobiParams(alpha=payload["alpha"], beta=payload["beta"])
        diag_raw = payload.get("diagnostics") or {}
        diag = RuleDiagnostics(**{k: diag_raw.get(k) for k in _diagnostics_dict(None)})
        rule = DiscreteMeasure(
            nodes=np.asarray(payload["nodes"], dtype=float),
            masses=np.asarray(payload["weights"], dtype=float),
            exactness_degree=int(payload["degree"]),
            diagnostics=diag,
        )
    except KeyError as exc:
        raise InputError(f"rule file {path} is missing field {exc}") from exc
    return params, rule


def write_coefficients_json(path, coeffs: FrameCoefficients) -> None:
    payload = {
        "alpha": coeffs.params.alpha,
        "beta": coeffs.params.beta,
        "S": coeffs.mask_order,
        "N": coeffs.max_level,
        "lowpass0": coeffs.lowpass0,
        "levels": [
            {
                "n": lvl.level,
                "nodes": lvl.measure.nodes,
                "masses": lvl.measure.masses,
                "tau": lvl.tau,
            }
            for lvl in coeffs.levels
        ],
    }
    Path(path).write_text(canonical_json(payload))


def read_coefficients_json(path) -> FrameCoefficients:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read coefficients file {path}: {exc}") from exc
    try:
        params = JacobiParams(alpha=payload["alpha"], beta=payload["beta"])
        levels = []
        for item in sorted(payload["levels"], key=lambda d: d["n"]):
            n = int(item["n"])
            measure = DiscreteMeasure(
                nodes=np.asarray(item["nodes"], dtype=float),
                masses=np.asarray(item["masses"], dtype=float),
                exactness_degree=2 ** (n + 1) - 1,
            )
            levels.append(
                FrameLevel(
                    level=n,
                    lam=float(2**n),
                    measure=measure,
                    tau=np.asarray(item["tau"], dtype=float),
                )
            )
        return FrameCoefficients(
            params=params,
            mask_order=int(payload["S"]),
            levels=tuple(levels),
            lowpass0=float(payload["lowpass0"]),
        )
    except KeyError as exc:
        raise InputError(f"coefficients file {path} is missing field {exc}") from exc


def builtin_function(name: str) -> Callable[[np.ndarray], np.ndarray]:
    """Built-in sample functions for frame commands."""
    if name == "abs_x":
        return np.abs
    if name == "step":
        return lambda x: np.where(np.asarray(x) >= 0.0, 1.0, 0.0)
    if name == "runge":
        return lambda x: 1.0 / (1.0 + 25.0 * np.asarray(x) ** 2)
    raise InputError(f"unknown builtin {name!r}; choose one of {BUILTIN_FUNCTIONS}")


def read_function_input(path) -> dict:
    """Parse a function input file.

    Either ``{"kind": "fourier", "coeffs": [...]}`` providing expansion
    coefficients directly, or ``{"kind": "samples", "builtin": <name>,
    "oracle_degree": <int>}`` asking for coefficients of a built-in function
    computed with a Gauss rule of the given size.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read function input {path}: {exc}") from exc
    kind = payload.get("kind")
    if kind == "fourier":
        coeffs = payload.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise InputError("fourier input requires a nonempty 'coeffs' list")
        return {"kind": "fourier", "coeffs": np.asarray(coeffs, dtype=float)}
    if kind == "samples":
        name = payload.get("builtin")
        if name not in BUILTIN_FUNCTIONS:
            raise InputError(
                f"samples input requires 'builtin' in {BUILTIN_FUNCTIONS}, got {name!r}"
            )
        oracle = payload.get("oracle_degree")
        if not isinstance(oracle, int) or oracle < 1:
            raise InputError("samples input requires a positive integer 'oracle_degree'")
        return {"kind": "samples", "builtin": name, "oracle_degree": oracle}
    raise InputError(f"unknown function input kind {kind!r}; expected 'fourier' or 'samples'")
