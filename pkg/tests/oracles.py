"""Independent reference values used by the tests.

These deliberately avoid the package's own special-function code.
"""
import math

EULER_GAMMA = 0.57721566490153286


def erf_series(x: float) -> float:
    """Maclaurin series of erf, summed until terms stop mattering."""
    terms = []
    n = 0
    term = x
    while True:
        terms.append(term / (2 * n + 1))
        n += 1
        term *= -x * x / n
        if abs(term) < 1e-20 * abs(terms[0]) and n > 5:
            break
    return 2.0 / math.sqrt(math.pi) * math.fsum(terms)


def e1_series(x: float) -> float:
    """-gamma - ln x - sum (-x)^n / (n n!), summed to convergence."""
    terms = []
    n = 1
    term = -x  # (-x)^n / n!
    while True:
        terms.append(term / n)
        n += 1
        term *= -x / n
        if abs(term) < 1e-20:
            break
    return -EULER_GAMMA - math.log(x) - math.fsum(terms)


def bisect(f, lo: float, hi: float, xtol: float = 1e-15) -> float:
    flo = f(lo)
    while hi - lo > xtol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def half_shape_median() -> float:
    """Median at k = 1/2 from P(1/2, x) = erf(sqrt x)."""
    return bisect(lambda x: erf_series(math.sqrt(x)) - 0.5, 0.1, 0.5, 1e-15)
