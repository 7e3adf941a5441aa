"""Dyadic band-pass analysis, tight-frame synthesis, and smoothness fitting.

Level n filters the expansion coefficients with the band-pass mask at
bandwidth ``2^n`` and samples the resulting polynomial on a quadrature rule
exact through degree ``2^{n+1} - 1`` (Gauss rules of size ``2^n`` by
default).  Adding the squared level norms recovers the squared norm of the
input up to the stored DC term, and summing the per-level reconstructions
inverts the transform exactly on band-limited inputs.  Local smoothness at a
point is estimated from the decay rate of windowed coefficient norms across
levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log
from typing import Optional, Sequence

import numpy as np

from .errors import CapacityError, InsufficientDataError, ParameterError
from .jacobi import DiscreteMeasure, JacobiParams, RecurrenceTable, _eval_matrix, gauss_rule
from .masks import KIND_BANDPASS, KIND_LOWPASS, MultiplierMask, derive_bandpass

__all__ = [
    "FrameLevel",
    "FrameCoefficients",
    "BesovEstimate",
    "level_measure",
    "sigma_star",
    "sigma_discrete",
    "analyze",
    "synthesize",
    "parseval_gap",
    "local_norms",
    "besov_fit",
]


@dataclass(frozen=True)
class FrameLevel:
    """Band-pass coefficients of one dyadic level on its quadrature support."""

    level: int
    lam: float
    measure: DiscreteMeasure
    tau: np.ndarray

    def __post_init__(self):
        needed = 2 ** (self.level + 1) - 1
        if self.measure.exactness_degree < needed:
            raise ParameterError(
                f"level {self.level} needs a measure exact through degree {needed}, "
                f"got {self.measure.exactness_degree}"
            )
        if self.tau.size != self.measure.size:
            raise ParameterError(
                f"coefficient count {self.tau.size} does not match "
                f"{self.measure.size} measure nodes"
            )


@dataclass(frozen=True)
class FrameCoefficients:
    """Full transform: contiguous levels 0..N plus the DC term of the input.

    The band-pass mask annihilates the constant coefficient, so ``lowpass0``
    (the zeroth expansion coefficient) is carried separately; synthesis adds
    it back, making the transform exactly invertible on band-limited inputs.
    """

    params: JacobiParams
    mask_order: int
    levels: tuple[FrameLevel, ...]
    lowpass0: float

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for expected, lvl in enumerate(self.levels):
            if lvl.level != expected:
                raise ParameterError(
                    f"levels must be contiguous from 0, found level {lvl.level} "
                    f"at position {expected}"
                )

    @property
    def max_level(self) -> int:
        return self.levels[-1].level


@dataclass(frozen=True)
class BesovEstimate:
    """Log-linear decay fit of windowed per-level coefficient norms."""

    interval: Optional[tuple[float, float]]
    p: float
    per_level_norms: np.ndarray
    gamma_hat: float
    fit_quality: float
    levels: np.ndarray

    def weighted_sup(self, threshold: float = 1e-14) -> float:
        """Sup-type functional ``max_n 2^{n * gamma_hat} * norm_n`` over usable levels."""
        usable = self.per_level_norms > threshold
        if not np.any(usable):
            return 0.0
        scale = 2.0 ** (self.levels[usable] * self.gamma_hat)
        return float(np.max(scale * self.per_level_norms[usable]))


def level_measure(table: RecurrenceTable, level: int) -> DiscreteMeasure:
    """Default level measure: the ``2^level``-point Gauss rule.

    Positive, of minimal size, and exact through degree ``2^{level+1} - 1``,
    which is all the analysis and synthesis identities require.
    """
    if level < 0:
        raise ParameterError(f"level must be >= 0, got {level}")
    return gauss_rule(table, 2**level)


def sigma_star(mask: MultiplierMask, lam: float, fhat: np.ndarray) -> np.ndarray:
    """Apply the diagonal multiplier ``mask(k/lam)`` to expansion coefficients.

    Returns the zero vector for ``lam < 1``.  The coefficient vector must
    cover every index below ``lam``; masks vanish from index ``lam`` on.
    """
    fhat = np.asarray(fhat, dtype=float)
    if lam < 1.0:
        return np.zeros_like(fhat)
    needed = int(np.ceil(lam))
    if fhat.size < needed:
        raise CapacityError(
            f"multiplier at bandwidth {lam} needs at least {needed} coefficients, "
            f"got {fhat.size}"
        )
    k = np.arange(fhat.size)
    return fhat * np.asarray(mask(k / lam), dtype=float)


def sigma_discrete(
    table: RecurrenceTable,
    mask: MultiplierMask,
    lam: float,
    measure: DiscreteMeasure,
    fvals: np.ndarray,
) -> np.ndarray:
    """Coefficients of the filtered polynomial built from samples on a rule.

    Coefficient k is ``mask(k/lam)`` times the discrete inner product
    ``sum_z w_z f(z) p_k(z)``; with a rule exact through degree
    ``ceil(3 lam / 2) - 1`` this reproduces every polynomial of degree at
    most ``lam / 2`` exactly.  Returns the zero polynomial for ``lam < 1``.
    """
    fvals = np.asarray(fvals, dtype=float)
    if fvals.shape != measure.nodes.shape:
        raise ParameterError(
            f"got {fvals.size} samples for {measure.size} nodes; lengths must match"
        )
    if lam < 1.0:
        return np.zeros(1)
    n_terms = int(np.floor(lam)) + 1
    table.require_capacity(n_terms)
    P = _eval_matrix(table, n_terms, measure.nodes)
    moments = P.T @ (measure.masses * fvals)
    k = np.arange(n_terms)
    return np.asarray(mask(k / lam), dtype=float) * moments


def analyze(
    table: RecurrenceTable,
    lowpass: MultiplierMask,
    max_level: int,
    fhat: np.ndarray,
    measures: Optional[Sequence[DiscreteMeasure]] = None,
) -> FrameCoefficients:
    """Band-pass transform of expansion coefficients across levels 0..max_level.

    For each level the coefficients are filtered with the band-pass companion
    of ``lowpass`` at bandwidth ``2^level`` and the resulting polynomial is
    evaluated on the level measure (Gauss by default; pass ``measures`` to
    substitute any rules satisfying the per-level exactness requirement).
    The input must supply at least ``2^max_level`` coefficients.
    """
    if lowpass.kind != KIND_LOWPASS:
        raise ParameterError(f"analyze requires a lowpass mask, got {lowpass.kind!r}")
    if max_level < 0:
        raise ParameterError(f"max_level must be >= 0, got {max_level}")
    fhat = np.asarray(fhat, dtype=float)
    needed = 2**max_level
    if fhat.size < needed:
        raise CapacityError(
            f"analysis to level {max_level} needs at least {needed} coefficients, "
            f"got {fhat.size}"
        )
    if measures is not None and len(measures) < max_level + 1:
        raise ParameterError(
            f"{len(measures)} measures supplied for {max_level + 1} levels"
        )
    bandpass = derive_bandpass(lowpass)
    levels = []
    for n in range(max_level + 1):
        lam = float(2**n)
        measure = level_measure(table, n) if measures is None else measures[n]
        n_terms = min(fhat.size, 2**n + 1)
        k = np.arange(n_terms)
        coeffs = np.asarray(bandpass(k / lam), dtype=float) * fhat[:n_terms]
        tau = _eval_matrix(table, n_terms, measure.nodes) @ coeffs
        levels.append(FrameLevel(level=n, lam=lam, measure=measure, tau=tau))
    return FrameCoefficients(
        params=table.params,
        mask_order=lowpass.order,
        levels=tuple(levels),
        lowpass0=float(fhat[0]),
    )


def synthesize(
    table: RecurrenceTable,
    lowpass: MultiplierMask,
    coeffs: FrameCoefficients,
) -> np.ndarray:
    """Reconstruct expansion coefficients from the band-pass transform.

    Each level contributes ``mask-filtered`` discrete inner products of its
    coefficients against the basis; the stored DC term is added to the
    constant coefficient.  The result equals the input coefficients filtered
    by the low-pass profile at bandwidth ``2^max_level``, hence recovers any
    input supported below half that bandwidth exactly.
    """
    if lowpass.kind != KIND_LOWPASS:
        raise ParameterError(f"synthesize requires a lowpass mask, got {lowpass.kind!r}")
    if lowpass.order != coeffs.mask_order:
        raise ParameterError(
            f"mask order {lowpass.order} does not match transform order {coeffs.mask_order}"
        )
    bandpass = derive_bandpass(lowpass)
    out_size = 2**coeffs.max_level
    out = np.zeros(out_size)
    out[0] = coeffs.lowpass0
    for lvl in coeffs.levels:
        contrib = sigma_discrete(table, bandpass, lvl.lam, lvl.measure, lvl.tau)
        n = min(contrib.size, out_size)
        out[:n] += contrib[:n]
    return out


def parseval_gap(coeffs: FrameCoefficients, fhat: np.ndarray) -> tuple[float, float, float]:
    """Compare the squared input norm with the summed squared level norms.

    Returns ``(lhs, rhs, gap)`` where ``lhs`` is the coefficient sum of
    squares, ``rhs`` the measure-weighted sum of squared level coefficients,
    and ``gap = |lhs - rhs - lowpass0^2| / lhs`` (0 for zero input).  The
    identity is exact for inputs supported below ``2^{max_level - 1}``.
    """
    fhat = np.asarray(fhat, dtype=float)
    lhs = float(fhat @ fhat)
    rhs = 0.0
    for lvl in coeffs.levels:
        rhs += float(np.sum(lvl.measure.masses * lvl.tau**2))
    if lhs == 0.0:
        return 0.0, rhs, 0.0
    gap = abs(lhs - rhs - coeffs.lowpass0**2) / lhs
    return lhs, rhs, gap


def local_norms(
    coeffs: FrameCoefficients,
    interval: tuple[float, float],
    p: float,
) -> np.ndarray:
    """Per-level norms of the coefficients restricted to a window.

    ``interval`` is (center, radius) with radius > 0; node membership is
    closed-interval.  For finite p the norm is measure-weighted; for
    ``p = inf`` it is the largest absolute coefficient in the window.
    Levels whose support misses the window contribute 0.
    """
    center, radius = float(interval[0]), float(interval[1])
    if radius <= 0.0:
        raise ParameterError(f"interval radius must be > 0, got {radius}")
    if p not in (1, 2) and not np.isinf(p):
        raise ParameterError(f"p must be 1, 2, or inf, got {p!r}")
    lo, hi = center - radius, center + radius
    out = np.zeros(len(coeffs.levels))
    for i, lvl in enumerate(coeffs.levels):
        inside = (lvl.measure.nodes >= lo) & (lvl.measure.nodes <= hi)
        if not np.any(inside):
            continue
        tau = lvl.tau[inside]
        if np.isinf(p):
            out[i] = float(np.max(np.abs(tau)))
        else:
            masses = lvl.measure.masses[inside]
            out[i] = float(np.sum(masses * np.abs(tau) ** p) ** (1.0 / p))
    return out


def besov_fit(
    norms: np.ndarray,
    p: float,
    interval: Optional[tuple[float, float]] = None,
    levels: Optional[Sequence[int]] = None,
    threshold: float = 1e-14,
) -> BesovEstimate:
    """Fit the dyadic decay exponent of per-level norms.

    Least-squares line through ``(n log 2, log norm_n)`` over levels whose
    norm exceeds ``threshold``; the negated slope is the decay exponent and
    the coefficient of determination the fit quality.  This is a finite-level
    stand-in for the sup-type sequence functional; at least 3 usable levels
    are required.
    """
    norms = np.asarray(norms, dtype=float)
    if levels is None:
        level_idx = np.arange(norms.size)
    else:
        level_idx = np.asarray(list(levels), dtype=float)
        if level_idx.size != norms.size:
            raise ParameterError(
                f"{level_idx.size} levels supplied for {norms.size} norms"
            )
    usable = norms > threshold
    if int(np.sum(usable)) < 3:
        raise InsufficientDataError(
            f"need at least 3 levels with norms above {threshold:.1e}, "
            f"got {int(np.sum(usable))}"
        )
    x = level_idx[usable] * log(2.0)
    y = np.log(norms[usable])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ np.array([slope, intercept])
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    quality = 1.0 if ss_tot == 0.0 and ss_res <= 1e-24 else 1.0 - ss_res / max(ss_tot, 1e-300)
    return BesovEstimate(
        interval=interval,
        p=p,
        per_level_norms=norms,
        gamma_hat=float(-slope),
        fit_quality=float(quality),
        levels=level_idx,
    )
