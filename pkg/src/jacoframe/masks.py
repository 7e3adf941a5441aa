"""Multiplier masks and the filtered polynomial kernels they induce.

A low-pass mask ``h`` is 1 on ``[0, 1/2]``, 0 on ``[1, inf)``, and descends
through a polynomial smoothstep of smoothness class C^S in between.  Its
band-pass companion is ``g = sqrt(h - h(2 .))``, supported on ``[1/4, 1]``.
Filtering the orthonormal basis with ``h(k/lam)`` gives kernels that decay
away from the diagonal at a rate controlled by S; this module evaluates
those kernels and measures the decay empirically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import betainc

from .errors import CapacityError, ParameterError
from .jacobi import RecurrenceTable, _eval_matrix, gauss_rule

__all__ = [
    "MultiplierMask",
    "make_lowpass",
    "make_indicator",
    "derive_bandpass",
    "phi",
    "row_l1",
    "localization_profile",
    "off_diagonal_sup",
]

KIND_LOWPASS = "lowpass_h"
KIND_BANDPASS = "bandpass_g"
KIND_INDICATOR = "indicator"

_VARIATION_SAMPLES = 10_001


@dataclass(frozen=True)
class MultiplierMask:
    """Filter profile on ``[0, inf)`` together with its smoothness order.

    ``variation_estimate`` is a numerical bound for the total variation of
    the (order-1)-th derivative of the profile; it calibrates empirical decay
    constants only and never enters a correctness path.
    """

    order: int
    kind: str
    profile: Callable[[np.ndarray], np.ndarray]
    variation_estimate: float

    def __call__(self, t):
        return self.profile(t)


def _smoothstep_rising(order: int) -> np.ndarray.__class__:
    # Regularized incomplete beta I_u(S+1, S+1): the unique degree-(2S+1)
    # polynomial rising 0 -> 1 on [0, 1] with S vanishing derivatives at both ends.
    def rise(u: np.ndarray) -> np.ndarray:
        return betainc(order + 1, order + 1, u)

    return rise


def _lowpass_profile(order: int) -> Callable[[np.ndarray], np.ndarray]:
    rise = _smoothstep_rising(order)

    def h(t):
        t = np.asarray(t, dtype=float)
        u = np.clip(2.0 * t - 1.0, 0.0, 1.0)
        out = 1.0 - rise(u)
        return float(out) if out.ndim == 0 else out

    return h


def _lowpass_variation(order: int) -> float:
    """Total variation of the (order-1)-th derivative of the low-pass profile.

    The transition piece is polynomial, so the derivative is evaluated from
    explicit polynomial coefficients and sampled densely over [1/2, 1]; the
    profile is flat elsewhere.
    """
    if order == 1:
        return 1.0
    # d/du of the rising smoothstep is u^S (1-u)^S / B(S+1, S+1).
    from scipy.special import beta as beta_fn

    poly = np.polynomial.Polynomial([0.0, 1.0]) ** order * np.polynomial.Polynomial([1.0, -1.0]) ** order
    deriv = poly.deriv(order - 2) if order > 2 else poly
    u = np.linspace(0.0, 1.0, _VARIATION_SAMPLES)
    # chain rule: t -> u = 2t - 1 contributes 2^(order-1) overall
    samples = (2.0 ** (order - 1)) * deriv(u) / beta_fn(order + 1, order + 1)
    return float(np.sum(np.abs(np.diff(samples))))


def make_lowpass(order: int) -> MultiplierMask:
    """Low-pass mask of the given smoothness order.

    The profile equals 1 on ``[0, 1/2]``, 0 on ``[1, inf)``, and on the
    transition interval is the unique degree ``2*order + 1`` polynomial with
    ``order`` vanishing derivatives at both endpoints, making the profile
    globally C^order and nonincreasing.
    """
    if order < 1:
        raise ParameterError(f"mask order must be >= 1, got {order}")
    return MultiplierMask(
        order=order,
        kind=KIND_LOWPASS,
        profile=_lowpass_profile(order),
        variation_estimate=_lowpass_variation(order),
    )


def make_indicator() -> MultiplierMask:
    """Sharp cutoff: 1 on ``[0, 1)``, 0 on ``[1, inf)``.

    Turns the filtered kernel at integer bandwidth into the plain
    partial-sum kernel; useful as a no-smoothing contrast case.
    """

    def profile(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t < 1.0, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out

    return MultiplierMask(order=1, kind=KIND_INDICATOR, profile=profile, variation_estimate=1.0)


def _numeric_variation(fn: Callable[[np.ndarray], np.ndarray], order: int, lo: float, hi: float) -> float:
    """Rough total-variation estimate of the (order-1)-th derivative by
    repeated finite differencing of dense samples.  Diagnostic only."""
    t = np.linspace(lo, hi, _VARIATION_SAMPLES)
    vals = np.asarray(fn(t), dtype=float)
    step = t[1] - t[0]
    for _ in range(order - 1):
        vals = np.gradient(vals, step)
    return float(np.sum(np.abs(np.diff(vals))))


def derive_bandpass(lowpass: MultiplierMask) -> MultiplierMask:
    """Band-pass companion ``g(t) = sqrt(h(t) - h(2t))`` of a low-pass mask.

    Supported on ``[1/4, 1]``.  The difference under the square root is
    clamped at zero; values below -1e-14 on a dense sample indicate a
    non-monotone profile and are rejected.
    """
    if lowpass.kind != KIND_LOWPASS:
        raise ParameterError(f"expected a lowpass mask, got kind={lowpass.kind!r}")
    h = lowpass.profile
    t = np.linspace(0.0, 1.25, _VARIATION_SAMPLES)
    diff = np.asarray(h(t), dtype=float) - np.asarray(h(2.0 * t), dtype=float)
    if np.min(diff) < -1e-14:
        raise ParameterError(
            f"h(t) - h(2t) reaches {np.min(diff):.3e} < -1e-14: profile is not nonincreasing"
        )

    def g(x):
        x = np.asarray(x, dtype=float)
        d = np.asarray(h(x), dtype=float) - np.asarray(h(2.0 * x), dtype=float)
        out = np.sqrt(np.maximum(d, 0.0))
        return float(out) if out.ndim == 0 else out

    return MultiplierMask(
        order=lowpass.order,
        kind=KIND_BANDPASS,
        profile=g,
        variation_estimate=_numeric_variation(g, lowpass.order, 0.0, 1.25),
    )


def phi(table: RecurrenceTable, mask: MultiplierMask, lam: float, x, t):
    """Filtered kernel ``sum_k mask(k/lam) p_k(x) p_k(t)`` for ``lam >= 1``.

    Returns 0 for ``lam < 1`` by convention.  Masks are assumed supported in
    ``[0, 1]``, so the sum stops at ``floor(lam)``.  Symmetric in (x, t):
    swapping the arguments multiplies the same floats in the same order.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(x.shape, t.shape)
    if lam < 1.0:
        return 0.0 if shape == () else np.zeros(shape)
    n_terms = int(np.floor(lam)) + 1
    table.require_capacity(n_terms)
    coeffs = np.asarray(mask(np.arange(n_terms) / lam), dtype=float)
    px = _eval_matrix(table, n_terms, np.broadcast_to(x, shape).ravel())
    pt = _eval_matrix(table, n_terms, np.broadcast_to(t, shape).ravel())
    out = (px * pt) @ coeffs
    return float(out[0]) if shape == () else out.reshape(shape)


def row_l1(
    table: RecurrenceTable,
    mask: MultiplierMask,
    lam: float,
    x: float,
    oracle_degree: int,
) -> float:
    """Estimate of the weighted L1 norm of ``phi(lam, x, .)``.

    The absolute value of the kernel is not a polynomial, so the Gauss rule
    of the given degree yields an estimate, not an exact integral; callers
    should use ``oracle_degree >= 2 * lam``.
    """
    if lam < 1.0:
        return 0.0
    rule = gauss_rule(table, oracle_degree)
    n_terms = int(np.floor(lam)) + 1
    table.require_capacity(n_terms)
    coeffs = np.asarray(mask(np.arange(n_terms) / lam), dtype=float)
    px = _eval_matrix(table, n_terms, np.asarray([float(x)]))[0]
    vals = _eval_matrix(table, n_terms, rule.nodes) @ (coeffs * px)
    return float(np.sum(rule.masses * np.abs(vals)))


def _require_localizable(table: RecurrenceTable) -> None:
    if not table.params.supports_localization:
        raise ParameterError(
            f"kernel decay estimates require min(alpha, beta) >= -1/2, "
            f"got alpha={table.params.alpha}, beta={table.params.beta}"
        )


def off_diagonal_sup(
    table: RecurrenceTable,
    mask: MultiplierMask,
    lam: float,
    min_separation: float,
    samples: int | None = None,
) -> float:
    """Largest ``|phi|`` over angle pairs separated by at least ``min_separation``.

    Both angles range over a uniform grid on ``[0, pi]`` dense enough to
    resolve the kernel oscillation (about 8 samples per wavelength).
    """
    if lam < 1.0:
        return 0.0
    if samples is None:
        samples = max(1024, 8 * int(np.ceil(lam)))
    n_terms = int(np.floor(lam)) + 1
    table.require_capacity(n_terms)
    thetas = np.linspace(0.0, np.pi, samples + 1)
    P = _eval_matrix(table, n_terms, np.cos(thetas))
    coeffs = np.asarray(mask(np.arange(n_terms) / lam), dtype=float)
    PM = P * coeffs
    best = 0.0
    chunk = max(1, (1 << 22) // (samples + 1))  # cap scratch blocks at ~32 MB
    for start in range(0, thetas.size, chunk):
        block = np.abs(PM[start : start + chunk] @ P.T)
        sep = np.abs(thetas[start : start + chunk, None] - thetas[None, :])
        block[sep < min_separation] = 0.0
        best = max(best, float(block.max()))
    return best


def localization_profile(
    table: RecurrenceTable,
    mask: MultiplierMask,
    lam: float,
    theta_grid,
    samples: int | None = None,
) -> np.ndarray:
    """Decay profile: rows ``(delta_theta, sup |phi|)`` over angle offsets.

    For each offset the supremum runs over pairs ``(theta, theta + offset)``
    with ``theta`` on a uniform grid.  Requires parameters in the range where
    the decay estimates apply.
    """
    _require_localizable(table)
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if np.any(theta_grid < 0.0) or np.any(theta_grid > np.pi):
        raise ParameterError("theta offsets must lie in [0, pi]")
    if samples is None:
        samples = max(1024, 8 * int(np.ceil(max(lam, 1.0))))
    out = np.zeros((theta_grid.size, 2))
    out[:, 0] = theta_grid
    if lam < 1.0:
        return out
    n_terms = int(np.floor(lam)) + 1
    table.require_capacity(n_terms)
    coeffs = np.asarray(mask(np.arange(n_terms) / lam), dtype=float)
    for i, dth in enumerate(theta_grid):
        base = np.linspace(0.0, np.pi - dth, samples + 1)
        left = _eval_matrix(table, n_terms, np.cos(base))
        right = _eval_matrix(table, n_terms, np.cos(base + dth))
        vals = np.einsum("ij,j,ij->i", left, coeffs, right)
        out[i, 1] = float(np.max(np.abs(vals)))
    return out
