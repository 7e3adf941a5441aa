"""Orthonormal Jacobi polynomials and the objects built directly on them.

Provides the three-term recurrence for the polynomials orthonormal under
``(1-x)^alpha (1+x)^beta dx`` on ``[-1, 1]``, partial-sum (reproducing)
kernels, Christoffel functions, Gauss rules obtained from the symmetric
tridiagonal recurrence matrix, and expansion coefficients of a function
against the orthonormal basis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import lgamma, log
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapacityError, NumericalError, ParameterError

__all__ = [
    "JacobiParams",
    "RecurrenceTable",
    "DiscreteMeasure",
    "RuleDiagnostics",
    "build_recurrence",
    "eval_all",
    "cd_kernel",
    "christoffel",
    "bar_weight",
    "gauss_rule",
    "fourier_coeffs",
]


@dataclass(frozen=True)
class JacobiParams:
    """Exponents of the weight ``(1-x)^alpha (1+x)^beta`` on ``(-1, 1)``.

    Both exponents must exceed -1 so the weight is integrable.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= -1.0:
                raise ParameterError(f"{name} must be finite and > -1, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def supports_localization(self) -> bool:
        """Whether ``min(alpha, beta) >= -1/2``.

        The off-diagonal kernel decay estimates hold only in this range;
        operations that rely on them refuse parameters below it.
        """
        return min(self.alpha, self.beta) >= -0.5


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence coefficients for the orthonormal polynomials.

    With ``p_{-1} = 0`` and ``p_0 = 1/m0``, the polynomials satisfy

        x p_k(x) = b[k+1] p_{k+1}(x) + a[k] p_k(x) + b[k] p_{k-1}(x)

    for ``0 <= k < max_degree``.  ``b[0]`` is ``m0`` by convention (it never
    enters the recurrence).  ``total_mass`` is the mass of the weight on
    ``[-1, 1]`` and ``m0`` its square root.
    """

    params: JacobiParams
    max_degree: int
    a: np.ndarray
    b: np.ndarray
    total_mass: float
    m0: float

    @property
    def capacity(self) -> int:
        """Number of polynomials this table can evaluate (degrees 0..max_degree)."""
        return self.max_degree + 1

    def require_capacity(self, n: int, what: str = "polynomials") -> None:
        if n > self.capacity:
            raise CapacityError(
                f"table holds {self.capacity} {what} (max degree {self.max_degree}), "
                f"but {n} were requested; rebuild with a larger max degree"
            )


@dataclass
class RuleDiagnostics:
    """Optional per-rule record; every field may be absent (None)."""

    condition: Optional[float] = None
    positive_count: Optional[int] = None
    total_variation: Optional[float] = None
    verify_error: Optional[float] = None
    cg_residual: Optional[float] = None
    cg_iters: Optional[int] = None
    wall_time_seconds: Optional[float] = None


@dataclass
class DiscreteMeasure:
    """Finitely supported (possibly signed) measure on ``[-1, 1]``.

    ``exactness_degree`` is the claimed degree through which the rule
    integrates polynomials against the underlying weight.
    """

    nodes: np.ndarray
    masses: np.ndarray
    exactness_degree: int
    diagnostics: Optional[RuleDiagnostics] = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if nodes.ndim != 1 or masses.ndim != 1:
            raise ParameterError("nodes and masses must be one-dimensional")
        if nodes.size != masses.size:
            raise ParameterError(
                f"nodes ({nodes.size}) and masses ({masses.size}) must have equal length"
            )
        if nodes.size and (nodes[0] < -1.0 - 1e-12 or nodes[-1] > 1.0 + 1e-12):
            raise ParameterError("nodes must lie in [-1, 1]")
        if nodes.size > 1 and np.any(np.diff(nodes) <= 0.0):
            raise ParameterError("nodes must be strictly increasing")
        self.nodes = nodes
        self.masses = masses

    @property
    def size(self) -> int:
        return self.nodes.size

    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.masses)))


def build_recurrence(params: JacobiParams, max_degree: int) -> RecurrenceTable:
    """Precompute the orthonormal recurrence up to ``max_degree``.

    Coefficients come from the closed-form monic recurrence; ``b[k]`` is the
    square root of the monic beta-coefficient, which is positive for every k.
    The k=1 coefficient uses its dedicated formula, which is the analytic
    limit of the generic one at alpha + beta + 1 = 0 (Chebyshev-adjacent
    parameters would otherwise hit 0/0).  The total mass is evaluated through
    log-gamma differences and exponentiated last so large exponents do not
    overflow.
    """
    if max_degree < 0:
        raise ParameterError(f"max_degree must be >= 0, got {max_degree}")
    al, be = params.alpha, params.beta
    ab = al + be
    total_mass = float(
        np.exp((ab + 1.0) * log(2.0) + lgamma(al + 1.0) + lgamma(be + 1.0) - lgamma(ab + 2.0))
    )
    m0 = float(np.sqrt(total_mass))

    n = max_degree
    a = np.zeros(n + 1)
    b = np.zeros(n + 1)
    a[0] = (be - al) / (ab + 2.0)
    b[0] = m0
    if n >= 1:
        k = np.arange(1, n + 1, dtype=float)
        a[1:] = (be * be - al * al) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        b[1] = np.sqrt(4.0 * (al + 1.0) * (be + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0)))
    if n >= 2:
        k = np.arange(2, n + 1, dtype=float)
        b[2:] = np.sqrt(
            4.0 * k * (k + al) * (k + be) * (k + ab)
            / ((2.0 * k + ab) ** 2 * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0))
        )
    a.setflags(write=False)
    b.setflags(write=False)
    return RecurrenceTable(params=params, max_degree=n, a=a, b=b, total_mass=total_mass, m0=m0)


def _eval_matrix(table: RecurrenceTable, n: int, xs: np.ndarray) -> np.ndarray:
    """Values of p_0..p_{n-1} at the points ``xs``, shape ``(len(xs), n)``."""
    if n < 1:
        raise ParameterError(f"need at least one polynomial, got n={n}")
    table.require_capacity(n)
    xs = np.ascontiguousarray(xs, dtype=float)
    a, b = table.a, table.b
    P = np.empty((xs.size, n))
    P[:, 0] = 1.0 / table.m0
    if n > 1:
        P[:, 1] = (xs - a[0]) * P[:, 0] / b[1]
    for k in range(1, n - 1):
        P[:, k + 1] = ((xs - a[k]) * P[:, k] - b[k] * P[:, k - 1]) / b[k + 1]
    return P


def eval_all(table: RecurrenceTable, n: int, x) -> np.ndarray:
    """Evaluate the first ``n`` orthonormal polynomials at ``x``.

    Returns an array of shape ``(n,)`` for scalar ``x`` and ``(n, len(x))``
    for one-dimensional ``x``.  Points outside ``[-1, 1]`` are evaluated by
    the same recurrence (no validation).
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    P = _eval_matrix(table, n, x_arr.ravel())
    out = P.T.reshape((n,) + x_arr.shape)
    if np.isscalar(x) or np.ndim(x) == 0:
        return out[:, 0]
    return out


def cd_kernel(table: RecurrenceTable, m: int, x, t):
    """Partial-sum kernel ``sum_{k<m} p_k(x) p_k(t)``; symmetric in (x, t)."""
    if m < 1:
        raise ParameterError(f"kernel defined for m >= 1, got m={m}")
    px = eval_all(table, m, x)
    pt = eval_all(table, m, t)
    out = np.sum(px * pt, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def christoffel(table: RecurrenceTable, m: int, x):
    """Christoffel function: reciprocal of the diagonal kernel ``cd_kernel(m, x, x)``."""
    if m < 1:
        raise ParameterError(f"christoffel defined for m >= 1, got m={m}")
    px = eval_all(table, m, x)
    out = 1.0 / np.sum(px * px, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def bar_weight(m: int, a: float, b: float, x):
    """Endpoint-regularized weight ``(sqrt(1-x)+1/m)^{2a} (sqrt(1+x)+1/m)^{2b}``."""
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    x = np.asarray(x, dtype=float)
    out = (np.sqrt(1.0 - x) + 1.0 / m) ** (2.0 * a) * (np.sqrt(1.0 + x) + 1.0 / m) ** (2.0 * b)
    return float(out) if out.ndim == 0 else out


def gauss_rule(table: RecurrenceTable, m: int) -> DiscreteMeasure:
    """m-point Gauss rule: nodes are the zeros of p_m, masses the Gauss weights.

    Computed from the eigen-decomposition of the m-th leading symmetric
    tridiagonal section of the recurrence matrix; the weight at each node is
    ``total_mass`` times the squared first eigenvector component, and agrees
    with the Christoffel function there.  Exact through degree ``2m - 1``.
    """
    if m < 1:
        raise ParameterError(f"gauss_rule needs m >= 1, got {m}")
    table.require_capacity(m, "recurrence rows")
    if m == 1:
        nodes = np.array([table.a[0]])
        masses = np.array([table.total_mass])
    else:
        try:
            nodes, vecs = eigh_tridiagonal(table.a[:m], table.b[1:m])
        except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
            raise NumericalError(
                f"tridiagonal eigen-solve failed for m={m}, params={table.params}: {exc}"
            ) from exc
        masses = table.total_mass * vecs[0, :] ** 2
    diag = RuleDiagnostics(
        positive_count=int(np.sum(masses > 0.0)),
        total_variation=float(np.sum(np.abs(masses))),
    )
    return DiscreteMeasure(nodes=nodes, masses=masses, exactness_degree=2 * m - 1, diagnostics=diag)


def fourier_coeffs(
    table: RecurrenceTable,
    f: Callable[[np.ndarray], np.ndarray],
    n_coeffs: int,
    oracle_degree: Optional[int] = None,
) -> np.ndarray:
    """First ``n_coeffs`` expansion coefficients of ``f`` in the orthonormal basis.

    Coefficient k approximates the weighted inner product of ``f`` with p_k,
    evaluated with an ``oracle_degree``-point Gauss rule (default ``4 *
    n_coeffs``).  The rule integrates the product exactly only when ``f`` is
    a polynomial of low enough degree; for general ``f`` the result is a
    quadrature estimate whose accuracy is the caller's responsibility.
    """
    if n_coeffs < 1:
        raise ParameterError(f"n_coeffs must be >= 1, got {n_coeffs}")
    table.require_capacity(n_coeffs)
    if oracle_degree is None:
        oracle_degree = 4 * n_coeffs
    rule = gauss_rule(table, oracle_degree)
    fvals = np.asarray(f(rule.nodes), dtype=float)
    if fvals.shape != rule.nodes.shape:
        fvals = np.array([float(f(z)) for z in rule.nodes])
    P = _eval_matrix(table, n_coeffs, rule.nodes)
    return P.T @ (rule.masses * fvals)
