"""Scattered-point geometry and quadrature weights from a Gram-matrix solve.

Given arbitrary nodes ``cos(theta_k)`` and a target exactness degree n, the
rule attaches the Christoffel mass of order n to each node, assembles the
(n+1) x (n+1) Gram matrix of the orthonormal basis under that discrete
measure, solves ``G b = e_0`` by preconditioned conjugate gradients, and
reads off weights that integrate every polynomial through degree n against
the Jacobi weight.  Geometry analysis (mesh norm, separation radius,
uniformity) and empirical norm-equivalence diagnostics live here as well.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import (
    CapacityError,
    InputError,
    ParameterError,
    RankDeficiencyError,
    SolverError,
)
from .jacobi import (
    DiscreteMeasure,
    RecurrenceTable,
    RuleDiagnostics,
    _eval_matrix,
    gauss_rule,
)

__all__ = [
    "ScatteredSet",
    "GramSystem",
    "analyze_set",
    "uniform_subset",
    "random_points",
    "build_rule",
    "verify_rule",
    "mz_ratio",
    "weight_bound_check",
]

_DUPLICATE_TOL = 1e-13
_GRAM_BLOCK = 64
_CG_REFRESH = 50


@dataclass(frozen=True)
class ScatteredSet:
    """Node angles in ``(0, pi)`` with their derived geometry.

    ``mesh_norm`` is half the largest gap between consecutive angles after
    padding with 0 and pi; ``separation_radius`` is half the smallest padded
    gap; ``uniformity`` is their ratio (always >= 1).  ``xs = cos(thetas)``
    is decreasing.
    """

    thetas: np.ndarray
    xs: np.ndarray
    mesh_norm: float
    separation_radius: float
    uniformity: float

    @property
    def size(self) -> int:
        return self.thetas.size


@dataclass
class GramSystem:
    """Assembled Gram matrix and the solved coordinate vector."""

    degree: int
    matrix: np.ndarray
    rhs: np.ndarray
    solution: np.ndarray
    residual_norm: float
    condition_estimate: float


def analyze_set(thetas) -> ScatteredSet:
    """Validate angles and compute mesh norm, separation radius, uniformity.

    Input may be unsorted; it is sorted internally.  Values must lie strictly
    inside ``(0, pi)`` and be pairwise distinct beyond 1e-13.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.ndim != 1:
        raise InputError("thetas must be one-dimensional")
    if thetas.size < 2:
        raise InputError(f"at least 2 points required, got {thetas.size}")
    bad = np.where(~np.isfinite(thetas) | (thetas <= 0.0) | (thetas >= np.pi))[0]
    if bad.size:
        i = int(bad[0])
        raise InputError(f"theta[{i}] = {thetas[i]!r} is outside (0, pi)")
    order = np.argsort(thetas, kind="stable")
    thetas = thetas[order]
    gaps = np.diff(thetas)
    close = np.where(gaps <= _DUPLICATE_TOL)[0]
    if close.size:
        i = int(close[0])
        raise InputError(
            f"duplicate angles at sorted positions {i} and {i + 1} "
            f"(theta = {thetas[i]!r}, separation {gaps[i]:.3e})"
        )
    padded = np.concatenate([[0.0], thetas, [np.pi]])
    padded_gaps = np.diff(padded)
    mesh = float(padded_gaps.max() / 2.0)
    sep = float(padded_gaps.min() / 2.0)
    thetas.setflags(write=False)
    xs = np.cos(thetas)
    xs.setflags(write=False)
    return ScatteredSet(
        thetas=thetas,
        xs=xs,
        mesh_norm=mesh,
        separation_radius=sep,
        uniformity=mesh / sep,
    )


def uniform_subset(sset: ScatteredSet) -> ScatteredSet:
    """Thin the set to one angle per window of a uniform partition.

    With ``m = floor(pi / (4 * mesh_norm))``, each window
    ``[(4j+1) pi/(4m), (4j+3) pi/(4m)]`` contains at least one angle (the
    window half-width is at least the mesh norm); the first angle in each
    window, by ascending order, is kept.  The result has mesh norm at most
    ``pi/m`` and all angles at distance at least ``pi/(4m)`` from 0 and pi.
    """
    if sset.mesh_norm > np.pi / 4.0:
        raise ParameterError(
            f"set too sparse for subset construction: mesh norm {sset.mesh_norm:.6f} > pi/4"
        )
    m = int(np.pi / sset.mesh_norm / 4.0)
    selected = []
    for j in range(m):
        lo = (4 * j + 1) * np.pi / (4 * m)
        hi = (4 * j + 3) * np.pi / (4 * m)
        i = int(np.searchsorted(sset.thetas, lo, side="left"))
        if i >= sset.size or sset.thetas[i] > hi:
            raise ParameterError(
                f"window [{lo:.6f}, {hi:.6f}] contains no angle; "
                f"mesh norm {sset.mesh_norm:.6f} inconsistent with the set"
            )
        selected.append(sset.thetas[i])
    return analyze_set(np.asarray(selected))


def random_points(count: int, seed: int) -> ScatteredSet:
    """One angle uniform in each of ``count`` equal subintervals of ``(0, pi)``.

    Draws ``u ~ U[0, 1)`` once per subinterval from
    ``numpy.random.default_rng(seed)`` (PCG64) via a single ``random(count)``
    call and sets ``theta_k = (k + u_k) * pi / count`` for ``k = 0..count-1``;
    an exact zero draw is replaced by 0.5 to keep the intervals open.  The
    stream is therefore reproducible from the seed alone.
    """
    if count < 2:
        raise ParameterError(f"count must be >= 2, got {count}")
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    u[u == 0.0] = 0.5
    thetas = (np.arange(count) + u) * (np.pi / count)
    return analyze_set(thetas)


def _assemble_gram(P: np.ndarray, masses: np.ndarray) -> np.ndarray:
    """Sum of per-node rank-1 contributions, accumulated in fixed blocks of
    nodes with compensated (Kahan) summation across blocks, then symmetrized."""
    k = P.shape[1]
    total = np.zeros((k, k))
    comp = np.zeros((k, k))
    for start in range(0, P.shape[0], _GRAM_BLOCK):
        block = P[start : start + _GRAM_BLOCK]
        contrib = (block * masses[start : start + _GRAM_BLOCK, None]).T @ block
        y = contrib - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return 0.5 * (total + total.T)


def _pcg(G: np.ndarray, rhs: np.ndarray, tol: float, max_iter: int):
    """Jacobi-preconditioned CG for symmetric positive (semi)definite systems.

    Stops when the recursively updated residual norm drops below ``tol``
    relative to ``|rhs|``; the residual is refreshed from the matrix every 50
    iterations to limit drift, and three refreshes in a row without a 2x
    improvement abort as stagnation.  Returns the iterate, its exact final
    residual norm, the iteration count, and the residual history.
    """
    diag = np.diagonal(G).copy()
    floor = np.max(np.abs(diag)) * 1e-14
    diag[diag <= floor] = 1.0

    rhs_norm = float(np.linalg.norm(rhs))
    abs_tol = tol * rhs_norm
    x = np.zeros_like(rhs)
    r = rhs.copy()
    z = r / diag
    p = z.copy()
    rz = float(r @ z)
    history = [rhs_norm]
    stagnant = 0
    prev_refresh_norm = np.inf
    converged = rhs_norm <= abs_tol
    iters = 0
    while iters < max_iter and not converged:
        iters += 1
        Gp = G @ p
        curvature = float(p @ Gp)
        if curvature <= 0.0:
            raise RankDeficiencyError(
                "negative curvature in CG: Gram matrix is numerically singular; "
                "lower the degree or supply more points"
            )
        alpha = rz / curvature
        x += alpha * p
        r -= alpha * Gp
        if iters % _CG_REFRESH == 0:
            r = rhs - G @ x
            rnorm = float(np.linalg.norm(r))
            if rnorm > 0.5 * prev_refresh_norm:
                stagnant += 1
                if stagnant >= 3:
                    history.append(rnorm)
                    break
            else:
                stagnant = 0
            prev_refresh_norm = rnorm
        rnorm = float(np.linalg.norm(r))
        history.append(rnorm)
        if rnorm <= abs_tol:
            converged = True
            break
        z = r / diag
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    final_residual = float(np.linalg.norm(rhs - G @ x))
    if not converged:
        raise SolverError(
            f"CG did not reach relative residual {tol:.1e} within {iters} iterations "
            f"(final residual {final_residual:.3e})",
            residual_history=history,
        )
    return x, final_residual, iters, history


def _condition_estimate(G: np.ndarray) -> float:
    """Ratio of extreme positive eigenvalues.

    Small systems (below 512 unknowns... full decomposition is cheap there)
    use a dense eigen-solve; larger ones use power iteration for the top of
    the spectrum and Cholesky-based inverse iteration for the bottom,
    falling back to the dense path when the factorization fails.
    """
    k = G.shape[0]
    if k <= 512:
        return _condition_dense(G)
    try:
        factor = cho_factor(G, check_finite=False)
    except LinAlgError:
        return _condition_dense(G)
    v = np.full(k, 1.0 / np.sqrt(k))
    hi = 0.0
    for _ in range(100):
        w = G @ v
        new_hi = float(v @ w)
        v = w / np.linalg.norm(w)
        if abs(new_hi - hi) <= 1e-10 * abs(new_hi):
            hi = new_hi
            break
        hi = new_hi
    v = np.full(k, 1.0 / np.sqrt(k))
    lo_inv = 0.0
    for _ in range(100):
        w = cho_solve(factor, v, check_finite=False)
        new_inv = float(v @ w)
        v = w / np.linalg.norm(w)
        if abs(new_inv - lo_inv) <= 1e-10 * abs(new_inv):
            lo_inv = new_inv
            break
        lo_inv = new_inv
    return float(hi * lo_inv)


def _condition_dense(G: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(G)
    positive = eigs[eigs > max(eigs[-1], 0.0) * 1e-12]
    if positive.size == 0 or eigs[-1] <= 0.0:
        return float("inf")
    return float(eigs[-1] / positive[0])


def build_rule(
    table: RecurrenceTable,
    sset: ScatteredSet,
    degree: int,
    cg_tol: float = 1e-14,
    max_iter: Optional[int] = None,
) -> tuple[DiscreteMeasure, GramSystem]:
    """Quadrature weights on the given nodes, exact through ``degree``.

    Parameters
    ----------
    table : RecurrenceTable
        Orthonormal recurrence for the target weight; capacity must cover
        ``degree + 1`` polynomials.
    sset : ScatteredSet
        Nodes; having at least ``degree + 1`` of them is recommended (a
        warning is emitted otherwise and the solve will likely break down).
    degree : int
        Requested exactness degree n >= 1.
    cg_tol : float
        Relative residual target for the conjugate-gradient solve.
    max_iter : int, optional
        Iteration cap, default ``4 * (degree + 1)``.

    Returns
    -------
    (DiscreteMeasure, GramSystem)
        The rule (nodes ascending, weights aligned, exactness recorded, and
        diagnostics filled: condition estimate, positive-weight count, total
        variation, CG residual/iterations, solve wall time) together with
        the solved Gram system.

    Raises
    ------
    SolverError
        CG failed to reach ``cg_tol`` within the iteration cap.
    RankDeficiencyError
        The Gram matrix is numerically singular (typically fewer points
        than coefficients, or badly clustered nodes).
    """
    if degree < 1:
        raise ParameterError(f"degree must be >= 1, got {degree}")
    table.require_capacity(degree + 1)
    if max_iter is None:
        max_iter = 4 * (degree + 1)
    if sset.size < degree + 1:
        warnings.warn(
            f"{sset.size} points for degree {degree}: Gram matrix of size "
            f"{degree + 1} cannot have full rank",
            RuntimeWarning,
            stacklevel=2,
        )

    nodes = sset.xs[::-1].copy()  # ascending in x
    P = _eval_matrix(table, degree + 1, nodes)
    masses = 1.0 / np.einsum("ij,ij->i", P[:, :degree], P[:, :degree])
    G = _assemble_gram(P, masses)
    rhs = np.zeros(degree + 1)
    rhs[0] = 1.0

    start = time.perf_counter()
    solution, residual, iters, _history = _pcg(G, rhs, cg_tol, max_iter)
    solve_time = time.perf_counter() - start

    weights = table.m0 * masses * (P @ solution)
    diagnostics = RuleDiagnostics(
        condition=_condition_estimate(G),
        positive_count=int(np.sum(weights > 0.0)),
        total_variation=float(np.sum(np.abs(weights))),
        cg_residual=residual,
        cg_iters=iters,
        wall_time_seconds=solve_time,
    )
    rule = DiscreteMeasure(
        nodes=nodes, masses=weights, exactness_degree=degree, diagnostics=diagnostics
    )
    system = GramSystem(
        degree=degree,
        matrix=G,
        rhs=rhs,
        solution=solution,
        residual_norm=residual,
        condition_estimate=diagnostics.condition,
    )
    return rule, system


def verify_rule(table: RecurrenceTable, rule: DiscreteMeasure, degree: int) -> float:
    """Spectral norm of ``I - (sum_z w_z p_k(z) p_l(z))`` for k, l <= degree//2.

    Zero exactly when the rule integrates every product of basis polynomials
    through total degree ``degree`` correctly; 1 for the all-zero rule.
    """
    k = degree // 2 + 1
    table.require_capacity(k)
    P = _eval_matrix(table, k, rule.nodes)
    B = (P * rule.masses[:, None]).T @ P
    defect = np.eye(k) - 0.5 * (B + B.T)
    return float(np.max(np.abs(np.linalg.eigvalsh(defect))))


def _abs_l1_ratio(
    table: RecurrenceTable,
    sset: ScatteredSet,
    m: int,
    coeffs: np.ndarray,
    oracle: DiscreteMeasure,
) -> float:
    """Ratio of the Christoffel-mass node sum of |P| to its weighted L1 norm."""
    deg = coeffs.size
    Pz = _eval_matrix(table, deg, sset.xs)
    Pm = _eval_matrix(table, m, sset.xs)
    masses = 1.0 / np.einsum("ij,ij->i", Pm, Pm)
    Po = _eval_matrix(table, deg, oracle.nodes)
    num = float(np.sum(masses * np.abs(Pz @ coeffs)))
    den = float(np.sum(oracle.masses * np.abs(Po @ coeffs)))
    return num / den


def mz_ratio(
    table: RecurrenceTable,
    sset: ScatteredSet,
    m: int,
    a: float,
    trials: int,
    seed: int,
) -> tuple[float, float]:
    """Empirical two-sided norm-equivalence constants for the node functional.

    Draws ``trials`` random polynomials of degree ``floor(a * m)`` with
    standard normal coefficients in the orthonormal basis and compares the
    sum of Christoffel masses of order m times ``|P|`` at the nodes against
    the weighted L1 norm of P (dense Gauss estimate).  Returns the smallest
    and largest observed ratio.
    """
    deg = int(np.floor(a * m))
    if deg < 1:
        raise ParameterError(f"floor(a * m) must be >= 1, got a={a}, m={m}")
    oracle = gauss_rule(table, max(8 * (deg + 1), 64))
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, -np.inf
    for _ in range(trials):
        coeffs = rng.standard_normal(deg + 1)
        ratio = _abs_l1_ratio(table, sset, m, coeffs, oracle)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return float(lo), float(hi)


def weight_bound_check(
    table: RecurrenceTable,
    rule: DiscreteMeasure,
    degree: Optional[int] = None,
) -> bool:
    """Check ``w_z <= lambda_n(z) * (1 + 1e-8)`` at every node.

    ``n`` defaults to half the rule's exactness degree; any positive-weight
    rule exact through ``2n`` satisfies the bound.  Requires all masses
    positive; exactness itself is the caller's responsibility.
    """
    if np.any(rule.masses <= 0.0):
        raise ParameterError("weight bound applies to positive-weight rules only")
    n = rule.exactness_degree // 2 if degree is None else degree
    if n < 1:
        raise ParameterError(f"comparison degree must be >= 1, got {n}")
    P = _eval_matrix(table, n, rule.nodes)
    lam = 1.0 / np.einsum("ij,ij->i", P, P)
    return bool(np.all(rule.masses <= lam * (1.0 + 1e-8)))
