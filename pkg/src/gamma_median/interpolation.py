"""Interpolating between the tight upper bound and the high-k lower bound.

Every median can be written exactly as

    m(k) = exp(-gamma) - g(k) * (exp(-gamma) - ln2 + 1/3) + k

in scaled space, with ``g`` rising from 0 to 1. Approximating ``g`` by a
closed-form sigmoid gives closed-form bounds and approximations; an
interpolator that sits above ``g`` yields a lower bound of the median.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .bounds import A_LOW_K, B_TAYLOR, INTERP_SPAN
from .median import ScaledValue, median
from .special import LN2, DomainError

P0 = (1.0 - B_TAYLOR) / INTERP_SPAN
PINF = (8.0 / 405.0 + A_LOW_K * LN2 - LN2**2 / 2.0) / INTERP_SPAN - LN2
P1 = (1.0 + A_LOW_K - 2.0 * LN2) / INTERP_SPAN


@dataclass(frozen=True)
class InterpolatorProperties:
    P0: float
    Pinf: float
    P1: float


IDEAL_PROPERTIES = InterpolatorProperties(P0, PINF, P1)


@dataclass(frozen=True)
class Rational1:
    """``k / (b0 + k)``; a logistic sigmoid in log k centred at ``b0``."""

    b0: float

    def __post_init__(self):
        if not self.b0 > 0:
            raise DomainError("b0 must be positive")

    @property
    def midpoint(self) -> float:
        return self.b0

    def value(self, k: float) -> float:
        return k / (self.b0 + k)


@dataclass(frozen=True)
class Arctan:
    """``(2/pi) atan(k / b)``; a Gudermannian shape in log k centred at ``b``."""

    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError("b must be positive")

    @property
    def midpoint(self) -> float:
        return self.b

    def value(self, k: float) -> float:
        return 2.0 / math.pi * math.atan(k / self.b)


@dataclass(frozen=True)
class RationalN:
    """Monic rational interpolator of degree N.

    ``numerator`` holds a_1..a_{N-1}, ``denominator`` holds b_0..b_{N-1}
    (lowest power first). Denominators with a positive real root are
    rejected.
    """

    numerator: tuple[float, ...]
    denominator: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(float(a) for a in self.numerator))
        object.__setattr__(self, "denominator", tuple(float(b) for b in self.denominator))
        n = len(self.denominator)
        if n < 1 or len(self.numerator) != n - 1:
            raise DomainError("need N >= 1 denominator and N - 1 numerator coefficients")
        roots = np.roots([1.0, *reversed(self.denominator)])
        for r in roots:
            if abs(r.imag) <= 1e-12 * max(1.0, abs(r)) and r.real > 0:
                raise DomainError(f"denominator vanishes at k = {r.real:.6g}")

    @property
    def degree(self) -> int:
        return len(self.denominator)

    def value(self, k: float) -> float:
        num = 0.0
        den = 0.0
        # Horner, highest power first; monic leading term k**N
        for a in (1.0, *reversed(self.numerator), 0.0):
            num = num * k + a
        for b in (1.0, *reversed(self.denominator)):
            den = den * k + b
        return num / den


Interpolator = Union[Rational1, Arctan, RationalN]


def eval_interpolator(interp: Interpolator, k: float) -> float:
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    return interp.value(k)


def interpolated_median(interp: Interpolator, k: float) -> ScaledValue:
    g = eval_interpolator(interp, k)
    return ScaledValue.from_scaled(k, A_LOW_K - g * INTERP_SPAN + k)


def interpolated_from_g(g: float, k: float) -> ScaledValue:
    return ScaledValue.from_scaled(k, A_LOW_K - g * INTERP_SPAN + k)


def ideal_g(k: float) -> float:
    """``(m_U - m) / (m_U - m_Linf)`` from the solved median."""
    m = median(k).value.scaled
    return (A_LOW_K + k - m) / INTERP_SPAN


def a_of_k(k: float) -> float:
    """A(k) with ``m = A(k) + k``."""
    return median(k).value.scaled - k


def b_of_k(k: float) -> float:
    """B(k) with ``m = exp(-gamma) + B(k) k``."""
    return (median(k).value.scaled - A_LOW_K) / k


TABLE2_ROWS = (
    ("rational", "low_k"),
    ("rational", "exact_at_1"),
    ("rational", "high_k"),
    ("arctan", "low_k"),
    ("arctan", "high_k"),
    ("arctan", "minimax_relative"),
    ("arctan", "minimax_absolute"),
    ("arctan", "exact_at_1"),
    ("arctan", "tangent_lower"),
)

TABLE2_FORMULAS = {
    ("rational", "low_k"): "1/P0",
    ("rational", "exact_at_1"): "1/P1 - 1",
    ("rational", "high_k"): "Pinf",
    ("arctan", "low_k"): "(2/pi)/P0",
    ("arctan", "high_k"): "(pi/2)*Pinf",
    ("arctan", "minimax_relative"): "argmin_b max|nu - nu~|/nu",
    ("arctan", "minimax_absolute"): "argmin_b max|nu - nu~|",
    ("arctan", "exact_at_1"): "cot((pi/2)*P1)",
    ("arctan", "tangent_lower"): "largest b with nu~ <= nu",
}

# U: median upper bound, L: median lower bound
TABLE2_SIDES = {
    ("rational", "low_k"): "U",
    ("rational", "high_k"): "L",
    ("arctan", "low_k"): "U",
    ("arctan", "tangent_lower"): "L",
}

_CLOSED_FORMS = {
    ("rational", "low_k"): lambda: 1.0 / P0,
    ("rational", "exact_at_1"): lambda: 1.0 / P1 - 1.0,
    ("rational", "high_k"): lambda: PINF,
    ("arctan", "low_k"): lambda: 2.0 / math.pi / P0,
    ("arctan", "high_k"): lambda: math.pi / 2.0 * PINF,
    ("arctan", "exact_at_1"): lambda: 1.0 / math.tan(math.pi / 2.0 * P1),
}

_SEARCH_TARGETS = {
    ("arctan", "minimax_relative"): "minimax-rel",
    # natural scale, as in the |nu - nu~| formula; see search.minimax_b
    ("arctan", "minimax_absolute"): "minimax-abs-natural",
    ("arctan", "tangent_lower"): "arctan-lower",
}


def table2_parameter(family: str, criterion: str) -> float:
    """Parameter (b0 or b) of one row of the interpolator catalog.

    Rows without a closed form are looked up in the search cache, running
    the search on a miss.
    """
    key = (family, criterion)
    if key in _CLOSED_FORMS:
        return _CLOSED_FORMS[key]()
    if key in _SEARCH_TARGETS:
        from .search import cached_search

        return cached_search(_SEARCH_TARGETS[key]).parameter
    raise KeyError(f"unknown interpolator row {family!r}/{criterion!r}")


def table2_interpolator(family: str, criterion: str) -> Interpolator:
    p = table2_parameter(family, criterion)
    return Rational1(p) if family == "rational" else Arctan(p)


def constrained_rational2() -> RationalN:
    """N=2 rational interpolator matching P0, Pinf and P1 simultaneously."""
    b0 = (P1 * (1.0 + PINF) - 1.0) / (P0 * (1.0 - P1) - P1)
    a1 = P0 * b0
    b1 = a1 + PINF
    return RationalN((a1,), (b0, b1))
