"""Median of the unit-scale gamma distribution.

All solving happens on the scaled variable ``m = 2**(1/k) * nu``; at
``k = 1e-3`` the median itself is around 1e-300 while ``m`` stays near 0.56.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .special import (
    EULER_GAMMA,
    LN2,
    ConvergenceError,
    DomainError,
    options_for_shape,
    reg_lower_gamma_log_ratio,
    reg_lower_gamma_log_x,
)

EXP_NEG_GAMMA = math.exp(-EULER_GAMMA)
K_MIN = 1e-4
K_MAX = 1e6

LAURENT_COEFFICIENTS = (
    Fraction(-1, 3),
    Fraction(2**3, 3**4 * 5),
    Fraction(2**3 * 23, 3**6 * 5 * 7),
    Fraction(2**3 * 281, 3**9 * 5**2 * 7),
    Fraction(-(2**3) * 17 * 139753, 3**13 * 5**3 * 7 * 11),
    Fraction(-(2**3) * 708494947, 3**15 * 5**3 * 7**2 * 11 * 13),
)


@dataclass(frozen=True)
class ScaledValue:
    """A positive quantity ``x`` at shape ``k`` carried as ``m = 2**(1/k) x``.

    ``scaled`` may be ``inf`` for values that only fit in log form (e.g. the
    exponential upper bound at very small k); ``log_natural`` is always finite.
    """

    k: float
    scaled: float
    log_natural: float

    @classmethod
    def from_scaled(cls, k: float, scaled: float) -> "ScaledValue":
        if not scaled > 0:
            raise DomainError(f"scaled value must be positive, got {scaled!r}")
        return cls(k, scaled, math.log(scaled) - LN2 / k)

    @classmethod
    def from_log_natural(cls, k: float, log_natural: float) -> "ScaledValue":
        log_scaled = log_natural + LN2 / k
        scaled = math.exp(log_scaled) if log_scaled < 709.0 else math.inf
        return cls(k, scaled, log_natural)

    @property
    def log_scaled(self) -> float:
        return self.log_natural + LN2 / self.k

    @property
    def natural(self) -> float:
        """The unscaled value; underflows to 0.0 for tiny k."""
        return math.exp(self.log_natural)


@dataclass(frozen=True)
class MedianSolution:
    value: ScaledValue
    cdf_residual: float
    iterations: int


def _check_k(k: float) -> None:
    if not (K_MIN <= k <= K_MAX):
        raise DomainError(f"k must lie in [{K_MIN:g}, {K_MAX:g}], got {k!r}")


def brent_root(f, a: float, b: float, fa: float, fb: float, xtol: float,
               ftol: float = math.inf, maxiter: int = 200):
    """Brent's bracketed root finder.

    Requires ``fa`` and ``fb`` of opposite sign (or zero). Stops once the
    bracket is below ``xtol`` and ``|f| <= ftol``; if the residual is still
    too large it keeps shrinking the bracket down to a couple of ulps.
    Returns ``(root, f(root), iterations)``.
    """
    if fa * fb > 0:
        raise ConvergenceError("root not bracketed")
    if fa == 0:
        return a, fa, 0
    if fb == 0:
        return b, fb, 0
    c, fc = a, fa
    d = e = b - a
    for it in range(1, maxiter + 1):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, fa = b, fb
            b, fb = c, fc
            c, fc = a, fa
        floor = 2.220446049250313e-16 * abs(b)
        tol = floor + 0.5 * xtol
        half = 0.5 * (c - b)
        if fb == 0 or abs(half) <= floor:
            return b, fb, it
        if abs(half) <= tol:
            if abs(fb) <= ftol:
                return b, fb, it
            xtol = 0.0
            tol = floor
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * half * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * half * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * half * q - abs(tol * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = e = half
        else:
            d = e = half
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, half)
        fb = f(b)
    raise ConvergenceError("Brent iteration limit reached")


@lru_cache(maxsize=65536)
def median(k: float) -> MedianSolution:
    """Solve P(k, nu) = 1/2.

    The bracket ``ln2 - 1/3 + k < m < exp(-gamma) + k`` comes from the
    tight affine lower and upper bounds and is never widened.
    """
    _check_k(k)
    opts = options_for_shape(k)
    shift = LN2 / k

    if k < 10.0:
        def f(m):
            return reg_lower_gamma_log_x(k, math.log(m) - shift, opts) - 0.5
    else:
        def f(m):
            return reg_lower_gamma_log_ratio(k, math.log1p((m - k) / k) - shift, opts) - 0.5

    lo = LN2 - 1.0 / 3.0 + k
    hi = EXP_NEG_GAMMA + k
    flo, fhi = f(lo), f(hi)
    if not (flo < 0.0 < fhi):
        raise ConvergenceError(f"median bracket failed at k={k}: f(lo)={flo}, f(hi)={fhi}")
    m, fm, iterations = brent_root(f, lo, hi, flo, fhi, xtol=1e-15 * hi, ftol=1e-13)
    return MedianSolution(ScaledValue.from_scaled(k, m), abs(fm), iterations)


def scaled_median(k: float) -> float:
    return median(k).value.scaled


def median_derivative(k: float, step: float | None = None) -> float:
    """Central difference d nu / dk of the natural-scale median."""
    if step is None:
        step = 1e-5 * max(1.0, k)
    if not step > 0:
        raise DomainError("step must be positive")
    if k - step <= 0:
        raise DomainError(f"k - step must be positive (k={k}, step={step})")
    hi = median(k + step).value.log_natural
    lo = median(k - step).value.log_natural
    return (math.exp(hi) - math.exp(lo)) / (2.0 * step)


def laurent_median(k: float, terms: int) -> float:
    """Partial sum ``k + sum_{j=0}^{terms} a_j k**-j`` of the large-k series."""
    if not 0 <= terms <= 5:
        raise DomainError(f"terms must be in [0, 5], got {terms!r}")
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    total = 0.0
    for j in range(terms, -1, -1):
        total += float(LAURENT_COEFFICIENTS[j]) * k ** -j
    return k + total
