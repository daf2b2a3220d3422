"""Numerical searches for the parameters that have no closed form.

Each search works on a geometric k grid that is refined 10x around the
points closest to violating the bound, so narrow graze points are not
stepped over.
"""
from __future__ import annotations

import hashlib
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

from .bounds import (
    A_LOW_K,
    BoundEvaluator,
    MarginPoint,
    geometric_grid,
    percentile_of,
    scaled_margin,
)
from .interpolation import Arctan, interpolated_from_g, interpolated_median
from .median import median, median_derivative
from .special import LN2

log = logging.getLogger(__name__)

CACHE_ENV = "GAMMA_MEDIAN_CACHE_DIR"
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SearchError(RuntimeError):
    """A search bracket or unimodality assumption did not hold."""


@dataclass(frozen=True)
class SearchConfig:
    k_min: float = 1e-3
    k_max: float = 1e3
    per_decade: int = 100
    param_tolerance: float = 1e-7
    margin_tolerance: float = 1e-12
    max_refinements: int = 6

    def __post_init__(self):
        if not (self.k_min <= 1e-3 and self.k_max >= 1e3):
            raise ValueError("search grid must cover at least [1e-3, 1e3]")
        if self.param_tolerance <= 0 or self.margin_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.per_decade < 1 or self.max_refinements < 0:
            raise ValueError("per_decade >= 1 and max_refinements >= 0 required")

    def grid(self) -> list[float]:
        return geometric_grid(self.k_min, self.k_max, self.per_decade)

    def digest(self) -> str:
        text = repr(sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


DEFAULT_CONFIG = SearchConfig()


@dataclass(frozen=True)
class TightBoundResult:
    parameter: float
    graze_k: float
    min_margin: float
    side: str


@dataclass
class VerificationReport:
    side: str
    points: list[MarginPoint] = field(repr=False)
    min_percentile: float
    max_percentile: float
    worst_margin: float
    worst_k: float
    passed: bool
    sign_change_k: float | None = None


# -- grids -------------------------------------------------------------------


def refine_around(base: list[float], scores: list[float], count: int = 5, factor: int = 10) -> list[float]:
    """Add ``factor``x finer points on both sides of the ``count`` lowest scores."""
    order = sorted(range(len(base)), key=lambda i: scores[i])[:count]
    extra = set()
    for i in order:
        for j in (i - 1, i):
            if 0 <= j and j + 1 < len(base):
                lo, hi = math.log(base[j]), math.log(base[j + 1])
                for s in range(1, factor):
                    extra.add(math.exp(lo + (hi - lo) * s / factor))
    return sorted(set(base) | extra)


def _zoom(fn: Callable[[float], float], k_center: float, spacing: float, levels: int) -> tuple[float, float]:
    """Localize the minimum of ``fn`` near ``k_center`` by nested 10x zooms in log k."""
    best_k, best = k_center, fn(k_center)
    step = spacing
    for _ in range(levels):
        step /= 10.0
        c = math.log(best_k)
        for s in range(-10, 11):
            k = math.exp(c + s * step)
            v = fn(k)
            if v < best:
                best_k, best = k, v
    return best_k, best


def _slack_fn(margin_of: Callable[[float], float], side: str) -> Callable[[float], float]:
    # slack >= 0 means the bound holds at k
    if side == "lower":
        return lambda k: -margin_of(k)
    return margin_of


def _min_slack(slack: Callable[[float], float], config: SearchConfig):
    base = config.grid()
    scores = [slack(k) for k in base]
    ks = refine_around(base, scores)
    vals = [slack(k) for k in ks]
    i = min(range(len(ks)), key=vals.__getitem__)
    return ks[i], vals[i]


def _graze(slack: Callable[[float], float], config: SearchConfig) -> tuple[float, float]:
    """Smallest slack: refined grid first, then zoomed in between grid points."""
    k0, _ = _min_slack(slack, config)
    spacing = math.log(10.0) / config.per_decade
    return _zoom(slack, k0, spacing, config.max_refinements)


def _margin_scale(k: float, config: SearchConfig) -> float:
    return config.margin_tolerance * (1.0 + median(k).value.scaled)


def _feasible(slack: Callable[[float], float], config: SearchConfig) -> bool:
    k, s = _graze(slack, config)
    return s >= -_margin_scale(k, config)


def tight_parameter(
    margin_for: Callable[[float], Callable[[float], float]],
    side: str,
    lo: float,
    hi: float,
    config: SearchConfig,
) -> TightBoundResult:
    """Bisect for the largest parameter whose margin stays on ``side``.

    ``margin_for(p)`` returns ``k -> scaled margin``; feasibility must be
    lost as the parameter increases.
    """
    ok = lambda p: _feasible(_slack_fn(margin_for(p), side), config)  # noqa: E731
    if not ok(lo):
        raise SearchError(f"lower end {lo} of the bracket is not a bound")
    if ok(hi):
        raise SearchError(f"upper end {hi} of the bracket is still a bound")
    def touching(p):
        k, s = _graze(_slack_fn(margin_for(p), side), config)
        return s <= _margin_scale(k, config)

    # keep going past param_tolerance until the margin actually grazes zero
    while hi - lo > config.param_tolerance or (not touching(lo) and hi - lo > 4e-16 * abs(hi)):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    graze_k, _ = _graze(_slack_fn(margin_for(lo), side), config)
    return TightBoundResult(lo, graze_k, margin_for(lo)(graze_k), side)


# -- specific searches -------------------------------------------------------


def find_tight_B_for_L0(config: SearchConfig = DEFAULT_CONFIG) -> TightBoundResult:
    """Largest B with ``2**(-1/k) (exp(-gamma) + B k) <= nu`` on the grid."""

    def margin_for(b):
        return lambda k: A_LOW_K + b * k - median(k).value.scaled

    guess = 0.4596507
    return tight_parameter(margin_for, "lower", 0.9 * guess, 1.1 * guess, config)


def derive_L1_coefficients(step: float = 1e-4) -> tuple[float, float]:
    """(A, B) of the lower bound tangent to the median at k = 1.

    The slope at k = 1 is a Richardson-extrapolated central difference
    from steps ``step`` and ``step / 2``.
    """
    d1 = median_derivative(1.0, step)
    d2 = median_derivative(1.0, step / 2.0)
    slope = (4.0 * d2 - d1) / 3.0
    b = 2.0 * (slope - LN2**2)
    a = 2.0 * LN2 - b
    return a, b


def median_slope_at_one(step: float = 1e-4) -> float:
    d1 = median_derivative(1.0, step)
    d2 = median_derivative(1.0, step / 2.0)
    return (4.0 * d2 - d1) / 3.0


def find_tight_arctan_lower(config: SearchConfig = DEFAULT_CONFIG) -> TightBoundResult:
    """Largest arctan midpoint b whose interpolated median stays below nu."""

    def margin_for(b):
        interp = Arctan(b)
        return lambda k: interpolated_median(interp, k).scaled - median(k).value.scaled

    guess = 0.205282
    return tight_parameter(margin_for, "lower", 0.9 * guess, 1.1 * guess, config)


ERROR_KINDS = ("relative", "absolute", "absolute-natural")


def approximation_error(interp, k: float, kind: str) -> float:
    """|nu - nu~| measured as ``kind`` (all computed from scaled values)."""
    m = median(k).value.scaled
    diff = abs(interpolated_median(interp, k).scaled - m)
    if kind == "relative":
        return diff / m
    if kind == "absolute":
        return diff
    if kind == "absolute-natural":
        return diff * math.exp(-LN2 / k)
    raise ValueError(f"unknown error kind {kind!r}")


@dataclass(frozen=True)
class MinimaxResult:
    parameter: float
    max_error: float
    argmax_k: float
    kind: str


def _max_error(b: float, kind: str, config: SearchConfig) -> tuple[float, float]:
    interp = Arctan(b)
    base = config.grid()
    errs = [approximation_error(interp, k, kind) for k in base]
    ks = refine_around(base, [-e for e in errs])
    vals = [approximation_error(interp, k, kind) for k in ks]
    i = max(range(len(ks)), key=vals.__getitem__)
    return vals[i], ks[i]


def minimax_b(config: SearchConfig = DEFAULT_CONFIG, error_kind: str = "relative",
              bracket: tuple[float, float] = (0.15, 0.30)) -> MinimaxResult:
    """Arctan midpoint b minimizing the worst-case error over the grid."""
    if error_kind not in ERROR_KINDS:
        raise ValueError(f"unknown error kind {error_kind!r}")
    lo, hi = bracket
    objective = lambda b: _max_error(b, error_kind, config)[0]  # noqa: E731

    # coarse scan guards the unimodality assumption of golden section
    n = 30
    bs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    fs = [objective(b) for b in bs]
    minima = [i for i in range(n + 1)
              if (i == 0 or fs[i] < fs[i - 1]) and (i == n or fs[i] <= fs[i + 1])]
    if len(minima) != 1:
        raise SearchError(f"objective not unimodal; local minima near b = {[bs[i] for i in minima]}")
    i = minima[0]
    a, c = bs[max(i - 1, 0)], bs[min(i + 1, n)]

    x1 = c - _GOLDEN * (c - a)
    x2 = a + _GOLDEN * (c - a)
    f1, f2 = objective(x1), objective(x2)
    while c - a > config.param_tolerance:
        if f1 < f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - _GOLDEN * (c - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (c - a)
            f2 = objective(x2)
    b = 0.5 * (a + c)
    err, k_at = _max_error(b, error_kind, config)
    return MinimaxResult(b, err, k_at, error_kind)


# -- verification ------------------------------------------------------------


def verify_bound_claim(evaluator: BoundEvaluator, side: str,
                       config: SearchConfig = DEFAULT_CONFIG) -> VerificationReport:
    """Check a claimed bound on the refined grid; failures are reported, not raised."""
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")

    def margin_of(k):
        return scaled_margin(evaluator(k), k)

    slack = _slack_fn(margin_of, side)
    base = config.grid()
    ks = refine_around(base, [slack(k) for k in base])
    points = []
    for k in ks:
        v = evaluator(k)
        points.append(MarginPoint(k, scaled_margin(v, k), percentile_of(v)))
    tol = config.margin_tolerance
    worst = min(points, key=lambda p: p.scaled_margin if side == "upper" else -p.scaled_margin)
    bad = [p for p in points
           if (p.scaled_margin < 0 if side == "upper" else p.scaled_margin > 0)
           and abs(p.scaled_margin) > tol * (1.0 + median(p.k).value.scaled)]
    change = None
    for p, q in zip(points, points[1:]):
        if (p.scaled_margin > 0) != (q.scaled_margin > 0) and p.scaled_margin != 0 and q.scaled_margin != 0:
            change = math.sqrt(p.k * q.k)
            break
    pct = [p.percentile for p in points]
    return VerificationReport(
        side=side,
        points=points,
        min_percentile=min(pct),
        max_percentile=max(pct),
        worst_margin=worst.scaled_margin,
        worst_k=worst.k,
        passed=not bad,
        sign_change_k=change,
    )


def ideal_interpolator_evaluator(g_fn: Callable[[float], float]) -> BoundEvaluator:
    return lambda k: interpolated_from_g(g_fn(k), k)


# -- cached results ----------------------------------------------------------

TARGETS = ("L0", "L1", "arctan-lower", "minimax-rel", "minimax-abs", "minimax-abs-natural")


@dataclass(frozen=True)
class SearchResult:
    target: str
    parameter: float
    abscissa: float
    extremum: float
    secondary: float | None = None


def run_search(target: str, config: SearchConfig = DEFAULT_CONFIG) -> SearchResult:
    if target == "L0":
        r = find_tight_B_for_L0(config)
        return SearchResult(target, r.parameter, r.graze_k, r.min_margin, A_LOW_K)
    if target == "L1":
        a, b = derive_L1_coefficients()
        margin = a + b - median(1.0).value.scaled
        return SearchResult(target, b, 1.0, margin, a)
    if target == "arctan-lower":
        r = find_tight_arctan_lower(config)
        return SearchResult(target, r.parameter, r.graze_k, r.min_margin)
    kinds = {"minimax-rel": "relative", "minimax-abs": "absolute",
             "minimax-abs-natural": "absolute-natural"}
    if target in kinds:
        r = minimax_b(config, kinds[target])
        return SearchResult(target, r.parameter, r.argmax_k, r.max_error)
    raise ValueError(f"unknown search target {target!r}; choose from {TARGETS}")


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "gamma-median"


def _cache_path(target: str, config: SearchConfig) -> Path:
    return cache_dir() / f"search-{target}-{config.digest()}.txt"


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def cached_search(target: str, config: SearchConfig = DEFAULT_CONFIG) -> SearchResult:
    """``run_search`` backed by a small plain-text file per (target, config)."""
    path = _cache_path(target, config)
    try:
        fields = dict(line.split("=", 1) for line in path.read_text().splitlines() if "=" in line)
        return SearchResult(
            target,
            float(fields["parameter"]),
            float(fields["abscissa"]),
            float(fields["extremum"]),
            float(fields["secondary"]) if fields.get("secondary") else None,
        )
    except (OSError, KeyError, ValueError):
        pass
    result = run_search(target, config)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            f"target={target}\nparameter={_fmt(result.parameter)}\n"
            f"abscissa={_fmt(result.abscissa)}\nextremum={_fmt(result.extremum)}\n"
            f"secondary={_fmt(result.secondary)}\n"
        )
    except OSError as exc:
        log.warning("could not write search cache %s: %s", path, exc)
    return result
