"""Median of the gamma distribution: high-precision solver, closed-form
bounds of the form ``2**(-1/k) (A + B k)`` and interpolated approximations."""

__version__ = "0.1.0"

from .special import (  # noqa: E402
    ConvergenceError,
    DomainError,
    EvalOptions,
    exp_integral_e1,
    log_gamma,
    reg_lower_gamma,
    reg_lower_gamma_log_x,
)
from .median import MedianSolution, ScaledValue, laurent_median, median, median_derivative  # noqa: E402
from .bounds import AffineBound, CATALOG, eval_affine, percentile_of  # noqa: E402
from .interpolation import Arctan, Rational1, RationalN, ideal_g, interpolated_median  # noqa: E402

__all__ = [
    "ConvergenceError", "DomainError", "EvalOptions", "exp_integral_e1", "log_gamma",
    "reg_lower_gamma", "reg_lower_gamma_log_x",
    "MedianSolution", "ScaledValue", "laurent_median", "median", "median_derivative",
    "AffineBound", "CATALOG", "eval_affine", "percentile_of",
    "Arctan", "Rational1", "RationalN", "ideal_g", "interpolated_median",
]
