"""Jacobi-weighted scattered-data quadrature, localized kernels, and tight
polynomial frames on [-1, 1].

Setting the environment variable ``JACOFRAME_THREADS`` before the first
import of this package caps the BLAS thread pools used by the numerical
kernels (it seeds OMP/OpenBLAS/MKL thread variables when they are unset).
"""

import os as _os
import sys as _sys

_threads = _os.environ.get("JACOFRAME_THREADS")
if _threads and "numpy" not in _sys.modules:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    InputError,
    InsufficientDataError,
    JacoframeError,
    NumericalError,
    ParameterError,
    RankDeficiencyError,
    SolverError,
)
from .jacobi import (
    DiscreteMeasure,
    JacobiParams,
    RecurrenceTable,
    RuleDiagnostics,
    bar_weight,
    build_recurrence,
    cd_kernel,
    christoffel,
    eval_all,
    fourier_coeffs,
    gauss_rule,
)
from .masks import (
    MultiplierMask,
    derive_bandpass,
    localization_profile,
    make_indicator,
    make_lowpass,
    off_diagonal_sup,
    phi,
    row_l1,
)
from .quadrature import (
    GramSystem,
    ScatteredSet,
    analyze_set,
    build_rule,
    mz_ratio,
    random_points,
    uniform_subset,
    verify_rule,
    weight_bound_check,
)
from .frame import (
    BesovEstimate,
    FrameCoefficients,
    FrameLevel,
    analyze,
    besov_fit,
    level_measure,
    local_norms,
    parseval_gap,
    sigma_discrete,
    sigma_star,
    synthesize,
)

__all__ = [
    "__version__",
    # errors
    "JacoframeError",
    "ParameterError",
    "CapacityError",
    "InputError",
    "InsufficientDataError",
    "NumericalError",
    "SolverError",
    "RankDeficiencyError",
    # core polynomials
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
    # masks and kernels
    "MultiplierMask",
    "make_lowpass",
    "make_indicator",
    "derive_bandpass",
    "phi",
    "row_l1",
    "localization_profile",
    "off_diagonal_sup",
    # scattered quadrature
    "ScatteredSet",
    "GramSystem",
    "analyze_set",
    "uniform_subset",
    "random_points",
    "build_rule",
    "verify_rule",
    "mz_ratio",
    "weight_bound_check",
    # frame analysis
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
