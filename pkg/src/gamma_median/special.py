"""Log-gamma, regularized lower incomplete gamma and E1.

Everything here is plain ``math``; no scipy. The incomplete gamma uses the
usual split at ``x = k + 1``: power series below, Lentz continued fraction for
the complement above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

EULER_GAMMA = 0.57721566490153286
LN2 = math.log(2.0)
_HALF_LN_2PI = 0.5 * math.log(2.0 * math.pi)
_TINY = 1e-300

# B_{2j} / (2j (2j - 1)), j = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(ArithmeticError):
    """A series, continued fraction or iteration ran out of budget."""


@dataclass(frozen=True)
class EvalOptions:
    rel_tolerance: float = 1e-15
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tolerance > 0:
            raise DomainError("rel_tolerance must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")


DEFAULT_OPTIONS = EvalOptions()


def options_for_shape(k: float) -> EvalOptions:
    """Default options with a term budget sized for shape ``k``.

    Series and continued fraction both need O(sqrt(k)) terms around x ~ k,
    so the flat budget of 500 only reaches k of a few thousand.
    """
    return EvalOptions(max_terms=max(DEFAULT_OPTIONS.max_terms, int(12.0 * math.sqrt(k)) + 100))


def _zeta_minus_one(n: int) -> float:
    """zeta(n) - 1 for integer n >= 2 (direct sum plus Euler-Maclaurin tail)."""
    big_n = 9
    s = 0.0
    for j in range(big_n - 1, 1, -1):
        s += j ** -n
    # tail sum_{j >= N} j^-n
    tail = big_n ** (1 - n) / (n - 1) + 0.5 * big_n ** -n
    # Bernoulli corrections: B2/2! f'(N) ..., f^(2j-1)(N) = -n(n+1)..(n+2j-2) N^(-n-2j+1)
    bern = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0)
    rising = float(n)
    fact = 2.0
    for j, b in enumerate(bern, start=1):
        tail += b / fact * rising * big_n ** (-n - 2 * j + 1)
        rising *= (n + 2 * j - 1) * (n + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return s + tail


_ZETA_M1 = tuple(_zeta_minus_one(n) for n in range(2, 60))


def _lgamma_2pz(z: float) -> float:
    """ln Gamma(2 + z) for |z| <= 0.5."""
    # ln G(1+z) = -log1p(z) + z(1-g) + sum_{n>=2} (-1)^n (zeta(n)-1) z^n / n
    s = 0.0
    zn = -z
    for i, zm1 in enumerate(_ZETA_M1):
        n = i + 2
        zn *= -z
        term = zm1 * zn / n
        s += term
        if abs(term) <= 1e-17 * abs(s):
            break
    return z * (1.0 - EULER_GAMMA) + s


def stirling_correction(x: float) -> float:
    """ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2] for x >= 10."""
    inv = 1.0 / x
    inv2 = inv * inv
    s = 0.0
    p = inv
    for c in _STIRLING:
        s += c * p
        p *= inv2
    return s


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for real ``x > 0``."""
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    if x < 0.5:
        # ln G(x) = ln G(x + 1) - ln x, x + 1 in [1, 1.5)
        return _lgamma_2pz(x) - math.log1p(x) - math.log(x)
    if x < 1.5:
        z = x - 1.0
        return _lgamma_2pz(z) - math.log1p(z)
    if x <= 2.5:
        return _lgamma_2pz(x - 2.0)
    if x < 10.0:
        n = int(math.floor(x - 1.5))
        y = x - n
        prod = 1.0
        for i in range(n):
            prod *= y + i
        return _lgamma_2pz(y - 2.0) + math.log(prod)
    return (x - 0.5) * math.log(x) - x + _HALF_LN_2PI + stirling_correction(x)


def _expm1mx(u: float) -> float:
    """exp(u) - 1 - u without cancellation for small u."""
    if abs(u) > 0.5:
        return math.expm1(u) - u
    term = 0.5 * u * u
    s = term
    n = 2
    while abs(term) > 1e-17 * abs(s):
        n += 1
        term *= u / n
        s += term
    return s


def _log_prefactor(k: float, log_x: float, x: float, log_ratio: float | None = None) -> float:
    """k ln x - x - ln Gamma(k + 1), arranged to be stable at large k."""
    if k < 10.0:
        return k * log_x - x - log_gamma(k + 1.0)
    # with x = k e^u the leading k ln k - k terms cancel exactly
    u = log_x - math.log(k) if log_ratio is None else log_ratio
    return (
        -k * _expm1mx(u)
        - 0.5 * math.log(2.0 * math.pi * k)
        - stirling_correction(k)
    )


def _series(k: float, x: float, opts: EvalOptions) -> float:
    # sum_{n>=0} x^n / ((k+1)...(k+n))
    term = 1.0
    total = 1.0
    ap = k
    for _ in range(opts.max_terms):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * opts.rel_tolerance * 0.1:
            return total
    raise ConvergenceError(f"incomplete gamma series did not converge (k={k}, x={x})")


def _continued_fraction(k: float, x: float, opts: EvalOptions) -> float:
    # modified Lentz for 1/(x+1-k- 1(1-k)/(x+3-k- ...)); Q = e^{-x} x^k / G(k) * h
    b = x + 1.0 - k
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, opts.max_terms + 1):
        an = -i * (i - k)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < opts.rel_tolerance * 0.1:
            return h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (k={k}, x={x})")


def _reg_lower(k: float, log_x: float, x: float, opts: EvalOptions,
               log_ratio: float | None = None) -> float:
    lpf = _log_prefactor(k, log_x, x, log_ratio)
    if x < k + 1.0:
        if lpf < -745.0:
            return 0.0
        return min(1.0, math.exp(lpf) * _series(k, x, opts))
    if lpf < -745.0:
        return 1.0
    q = math.exp(lpf) * k * _continued_fraction(k, x, opts)
    return max(0.0, 1.0 - q)


def reg_lower_gamma(k: float, x: float, options: EvalOptions | None = None) -> float:
    """Regularized lower incomplete gamma P(k, x), the unit-scale gamma CDF."""
    if not (k > 0.0 and math.isfinite(k)):
        raise DomainError(f"shape k must be finite and > 0, got {k!r}")
    if not x >= 0.0 or math.isnan(x):
        raise DomainError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return _reg_lower(k, math.log(x), x, options or options_for_shape(k))


def reg_lower_gamma_log_x(k: float, log_x: float, options: EvalOptions | None = None) -> float:
    """P(k, exp(log_x)) for arguments whose exponential under- or overflows.

    Below ``log_x = -700`` the point is treated as 0 inside the series (all
    higher terms vanish) while the prefactor keeps the full log argument.
    """
    if not (k > 0.0 and math.isfinite(k)):
        raise DomainError(f"shape k must be finite and > 0, got {k!r}")
    if not math.isfinite(log_x):
        raise DomainError(f"log_x must be finite, got {log_x!r}")
    if log_x > 709.0:
        return 1.0
    x = math.exp(log_x) if log_x > -700.0 else 0.0
    return _reg_lower(k, log_x, x, options or options_for_shape(k))


def reg_lower_gamma_log_ratio(k: float, log_ratio: float,
                              options: EvalOptions | None = None) -> float:
    """P(k, k * exp(log_ratio)).

    At large k the CDF near the median is sensitive to the last bits of
    ``ln x``; passing ``ln(x / k)`` directly keeps those bits.
    """
    if not (k > 0.0 and math.isfinite(k)):
        raise DomainError(f"shape k must be finite and > 0, got {k!r}")
    if not math.isfinite(log_ratio):
        raise DomainError(f"log_ratio must be finite, got {log_ratio!r}")
    log_x = log_ratio + math.log(k)
    if log_x > 709.0:
        return 1.0
    x = k * math.exp(log_ratio) if log_x > -700.0 else 0.0
    return _reg_lower(k, log_x, x, options or options_for_shape(k), log_ratio)


def exp_integral_e1(x: float, options: EvalOptions = DEFAULT_OPTIONS) -> float:
    """Exponential integral E1(x) = -Ei(-x) for x > 0."""
    if not (x > 0.0) or math.isnan(x):
        raise DomainError(f"E1 requires x > 0, got {x!r}")
    if math.isinf(x) or x > 745.0:
        return 0.0
    if x <= 1.0:
        total = 0.0
        term = 1.0
        for n in range(1, options.max_terms + 1):
            term *= -x / n
            contrib = -term / n
            total += contrib
            if abs(contrib) < abs(total) * options.rel_tolerance * 0.1:
                return -EULER_GAMMA - math.log(x) + total
        raise ConvergenceError(f"E1 series did not converge at x={x}")
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, options.max_terms + 1):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < options.rel_tolerance * 0.1:
            return h * math.exp(-x)
    raise ConvergenceError(f"E1 continued fraction did not converge at x={x}")
