"""Closed-form median bounds of the form ``2**(-1/k) * (A + B k)`` and friends.

Margins are reported in scaled space, ``2**(1/k) * (approx - nu)``, which
equals ``m_approx - m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .median import EXP_NEG_GAMMA, K_MAX, K_MIN, ScaledValue, laurent_median, median
from .special import LN2, DomainError, log_gamma, reg_lower_gamma_log_x

A_LOW_K = EXP_NEG_GAMMA
A_HIGH_K = LN2 - 1.0 / 3.0
B_TAYLOR = EXP_NEG_GAMMA * math.pi**2 / 12.0
# gap between the tight upper and high-k lower bounds; independent of k
INTERP_SPAN = A_LOW_K - A_HIGH_K


@dataclass(frozen=True)
class AffineBound:
    A: float
    B: float
    name: str = ""

    def __post_init__(self):
        if self.A < 0 or self.B < 0:
            raise DomainError("A and B must be non-negative")
        if self.A == 0 and self.B == 0:
            raise DomainError("(A, B) = (0, 0) is not a member of the family")


BERG_LOWER = AffineBound(0.0, 1.0, "berg_lower")
NU0 = AffineBound(EXP_NEG_GAMMA, 0.0, "nu0")
NU1 = AffineBound(EXP_NEG_GAMMA, B_TAYLOR, "nu1")
# tight value is 0.4596506761705...; the 7-digit 0.4596507 rounds up and
# overshoots the median near k = 0.0708, so keep one more digit, rounded down
NU_L0 = AffineBound(EXP_NEG_GAMMA, 0.45965067, "nuL0")
NU_L1 = AffineBound(0.4111107, 0.9751836, "nuL1")
NU_LINF = AffineBound(A_HIGH_K, 1.0, "nuLinf")
NU_U = AffineBound(EXP_NEG_GAMMA, 1.0, "nuU")

CATALOG = {b.name: b for b in (BERG_LOWER, NU0, NU1, NU_L0, NU_L1, NU_LINF, NU_U)}

# side of the median each catalog entry sits on; None for approximations
CATALOG_SIDE = {
    "berg_lower": "lower",
    "nu0": "lower",
    "nu1": None,
    "nuL0": "lower",
    "nuL1": "lower",
    "nuLinf": "lower",
    "nuU": "upper",
}


@dataclass(frozen=True)
class MarginPoint:
    k: float
    scaled_margin: float
    percentile: float


def eval_affine(bound: AffineBound, k: float) -> ScaledValue:
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    m = bound.A + bound.B * k
    if not m > 0:
        raise DomainError(f"A + Bk must be positive (k={k})")
    return ScaledValue.from_scaled(k, m)


def eval_gamma_power_bound(k: float) -> ScaledValue:
    """Lower bound ``2**(-1/k) Gamma(k+1)**(1/k)`` from dropping ``exp(-x)``."""
    if not (K_MIN <= k <= K_MAX):
        raise DomainError(f"k must lie in [{K_MIN:g}, {K_MAX:g}], got {k!r}")
    return ScaledValue.from_scaled(k, math.exp(log_gamma(k + 1.0) / k))


def eval_berg_upper(k: float) -> ScaledValue:
    """Upper bound ``exp(-1/(3k)) k``."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    return ScaledValue.from_log_natural(k, math.log(k) - 1.0 / (3.0 * k))


def eval_chen_rubin_upper(k: float) -> ScaledValue:
    return ScaledValue.from_log_natural(k, math.log(k))


def eval_chen_rubin_lower(k: float) -> ScaledValue | None:
    """``k - 1/3``, or None where it is not positive."""
    if k <= 1.0 / 3.0:
        return None
    return ScaledValue.from_log_natural(k, math.log(k - 1.0 / 3.0))


def eval_laurent(k: float, terms: int) -> ScaledValue | None:
    v = laurent_median(k, terms)
    if v <= 0:
        return None
    return ScaledValue.from_log_natural(k, math.log(v))


def percentile_of(value: ScaledValue | None) -> float:
    """100 P(k, x); a missing (non-positive) value sits at the 0th percentile."""
    if value is None:
        return 0.0
    return 100.0 * reg_lower_gamma_log_x(value.k, value.log_natural)


def scaled_margin(value: ScaledValue | None, k: float) -> float:
    m = median(k).value.scaled
    if value is None:
        return -math.inf
    if math.isinf(value.scaled):
        return math.inf
    return value.scaled - m


BoundEvaluator = Callable[[float], "ScaledValue | None"]


def affine_evaluator(bound: AffineBound) -> BoundEvaluator:
    return lambda k: eval_affine(bound, k)


def margin_curve(evaluator: BoundEvaluator, k_grid: Sequence[float]) -> list[MarginPoint]:
    ks = list(k_grid)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("k grid must be strictly increasing")
    out = []
    for k in ks:
        v = evaluator(k)
        out.append(MarginPoint(k, scaled_margin(v, k), percentile_of(v)))
    return out


def ab_locus(k: float) -> tuple[float, float]:
    """The line ``A + B k = m(k)`` as ``(intercept, slope)`` of A against B."""
    return median(k).value.scaled, -k


def geometric_grid(k_min: float = 1e-3, k_max: float = 1e3, per_decade: int = 100) -> list[float]:
    """Geometric grid with ``per_decade`` intervals per decade, endpoints included."""
    if not (0 < k_min < k_max) or per_decade < 1:
        raise DomainError("need 0 < k_min < k_max and per_decade >= 1")
    lo, hi = math.log10(k_min), math.log10(k_max)
    n = int(round((hi - lo) * per_decade))
    return [10.0 ** (lo + (hi - lo) * i / n) for i in range(n + 1)]


def holds(margin: float, m: float, side: str, tol: float = 1e-12) -> bool:
    """Whether a scaled margin is on the right side, allowing graze noise."""
    if abs(margin) <= tol * (1.0 + m):
        return True
    return margin < 0 if side == "lower" else margin > 0


def sign_changes(margins: Iterable[float]) -> int:
    signs = [1 if x > 0 else -1 for x in margins if x != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)
