"""Quantitative claims about the median bounds, checked numerically.

Each claim computes a measured value on the k grid and compares it with a
threshold. ``run_claims`` backs the ``verify`` subcommand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .bounds import (
    A_HIGH_K,
    A_LOW_K,
    B_TAYLOR,
    BERG_LOWER,
    NU0,
    NU1,
    NU_L0,
    NU_L1,
    NU_LINF,
    NU_U,
    affine_evaluator,
    eval_berg_upper,
    eval_gamma_power_bound,
    geometric_grid,
    holds,
    percentile_of,
)
from .interpolation import (
    P0,
    P1,
    PINF,
    Arctan,
    Rational1,
    constrained_rational2,
    ideal_g,
    interpolated_median,
    table2_parameter,
)
from .median import brent_root, laurent_median, median, median_derivative
from .search import (
    SearchConfig,
    derive_L1_coefficients,
    find_tight_arctan_lower,
    find_tight_B_for_L0,
    minimax_b,
    verify_bound_claim,
)
from .special import LN2

BAND_SLACK = 0.01  # percentile points


@dataclass(frozen=True)
class ClaimResult:
    id: str
    description: str
    measured: str
    threshold: str
    passed: bool


@dataclass(frozen=True)
class Claim:
    id: str
    description: str
    check: Callable[[SearchConfig], tuple[str, str, bool]]


def _interp_eval(interp):
    return lambda k: interpolated_median(interp, k)


def _median_exactness(cfg):
    worst = max(abs(percentile_of(median(k).value) - 50.0) for k in cfg.grid())
    err1 = abs(median(1.0).value.natural - LN2)
    ok = worst <= 1e-9 and err1 <= 1e-13
    return f"max|pct-50|={worst:.3g}; |nu(1)-ln2|={err1:.3g}", "1e-9; 1e-13", ok


def _chen_rubin(cfg):
    bad = 0
    for k in cfg.grid():
        # compare log of scaled values; 2**(1/k) overflows below k ~ 1e-3
        log_m = math.log(median(k).value.scaled)
        shift = LN2 / k
        upper_ok = log_m < math.log(k) + shift
        lower_ok = k <= 1.0 / 3.0 or log_m > math.log(k - 1.0 / 3.0) + shift
        if not (upper_ok and lower_ok):
            bad += 1
    return f"violations={bad}", "0", bad == 0


def _catalog_boundhood(cfg):
    checks = {
        "nuLinf": (affine_evaluator(NU_LINF), "lower"),
        "nuL0": (affine_evaluator(NU_L0), "lower"),
        "nuL1": (affine_evaluator(NU_L1), "lower"),
        "berg_lower": (affine_evaluator(BERG_LOWER), "lower"),
        "nu0": (affine_evaluator(NU0), "lower"),
        "gamma_power": (eval_gamma_power_bound, "lower"),
        "nuU": (affine_evaluator(NU_U), "upper"),
        "berg_upper": (eval_berg_upper, "upper"),
    }
    failed = [name for name, (ev, side) in checks.items() if not verify_bound_claim(ev, side, cfg).passed]
    return f"failed={failed or 'none'}", "all hold", not failed


def _band(evaluator, lo, hi):
    def check(cfg):
        r = verify_bound_claim(evaluator, "lower", cfg)
        ok = True
        if lo is not None:
            ok &= r.min_percentile > lo - BAND_SLACK
        if hi is not None:
            ok &= r.max_percentile < hi + BAND_SLACK
        return (f"[{r.min_percentile:.5f}, {r.max_percentile:.5f}]",
                f"({'-inf' if lo is None else lo}, {'inf' if hi is None else hi}) +-{BAND_SLACK}", ok)
    return check


def _rational_pair(cfg):
    up = verify_bound_claim(_interp_eval(Rational1(1.0 / P0)), "upper", cfg)
    low = verify_bound_claim(_interp_eval(Rational1(PINF)), "lower", cfg)
    ok = low.min_percentile > 49.69 - BAND_SLACK and up.max_percentile < 50.85 + BAND_SLACK
    return f"[{low.min_percentile:.5f}, {up.max_percentile:.5f}]", "(49.69, 50.85) +-0.01", ok


def _slope(cfg):
    d = median_derivative(1.0)
    return f"{d:.9f}", "0.9680448 +-1e-6", abs(d - 0.9680448) <= 1e-6


def _l0(cfg):
    r = find_tight_B_for_L0(cfg)
    return f"B={r.parameter:.8f} graze_k={r.graze_k:.5f}", "0.4596507 +-1e-5", abs(r.parameter - 0.4596507) <= 1e-5


def _l1(cfg):
    a, b = derive_L1_coefficients()
    ok = abs(a - 0.4111107) <= 1e-5 and abs(b - 0.9751836) <= 1e-5
    return f"A={a:.8f} B={b:.8f}", "(0.4111107, 0.9751836) +-1e-5", ok


def _arctan_lower(cfg):
    r = find_tight_arctan_lower(cfg)
    ok = abs(r.parameter - 0.205282) <= 1e-5 and abs(r.graze_k - 0.4184) <= 1e-2
    return f"b={r.parameter:.7f} k={r.graze_k:.4f}", "0.205282 +-1e-5; k 0.4184 +-1e-2", ok


def _minimax_rel(cfg):
    r = minimax_b(cfg, "relative")
    return f"b={r.parameter:.6f}", "0.21639 +-2e-4", abs(r.parameter - 0.21639) <= 2e-4


def _minimax_abs(cfg):
    nat = minimax_b(cfg, "absolute-natural")
    sc = minimax_b(cfg, "absolute")
    return (f"natural b={nat.parameter:.6f}; scaled b={sc.parameter:.6f}",
            "0.21008 +-2e-4 (natural scale)", abs(nat.parameter - 0.21008) <= 2e-4)


def _properties(cfg):
    ok = abs(P0 - 2.66913) <= 1e-5 and abs(PINF - 0.143472) <= 1e-5 and abs(P1 - 0.868678) <= 1e-5
    ok &= abs(ideal_g(1.0) - P1) <= 1e-5
    return f"P0={P0:.6f} Pinf={PINF:.6f} P1={P1:.6f}", "2.66913, 0.143472, 0.868678 +-1e-5", ok


def _ideal_slopes(cfg):
    k = 1e-4
    h = k / 10.0
    s0 = (ideal_g(k + h) - ideal_g(k)) / h
    t = 1e-4
    ht = t / 10.0
    sinf = -(ideal_g(1.0 / (t + ht)) - ideal_g(1.0 / (t - ht))) / (2.0 * ht)
    r0, rinf = abs(s0 / P0 - 1.0), abs(sinf / PINF - 1.0)
    return f"rel err P0 {r0:.2g}, Pinf {rinf:.2g}", "1e-3", r0 <= 1e-3 and rinf <= 1e-3


def _table2(cfg):
    rows = {
        ("rational", "low_k"): 0.374654,
        ("rational", "exact_at_1"): 0.151175,
        ("rational", "high_k"): 0.143472,
        ("arctan", "low_k"): 0.238512,
        ("arctan", "high_k"): 0.225366,
        ("arctan", "exact_at_1"): 0.209257,
    }
    worst = max(abs(table2_parameter(*key) - v) for key, v in rows.items())
    return f"max dev={worst:.2g}", "1e-6", worst <= 1e-6


def _not_a_bound(evaluator):
    def check(cfg):
        r = verify_bound_claim(evaluator, "lower", cfg)
        margins = [p.scaled_margin for p in r.points]
        m_tol = [cfg.margin_tolerance * (1.0 + median(p.k).value.scaled) for p in r.points]
        pos = any(x > t for x, t in zip(margins, m_tol))
        neg = any(x < -t for x, t in zip(margins, m_tol))
        where = "none" if r.sign_change_k is None else f"{r.sign_change_k:.4g}"
        return f"sign change near k={where}", "both signs present", pos and neg
    return check


def _asymptotes(cfg):
    k = 1e3
    hi_meas = k * (median(k).value.scaled - (A_HIGH_K + k)) * 2.0 ** (-1.0 / k)
    hi_ref = 8.0 / 405.0 - LN2 / 3.0 + LN2**2 / 2.0
    k = 1e-3
    lo_meas = (A_LOW_K + k - median(k).value.scaled) / k
    lo_ref = 1.0 - B_TAYLOR
    u_meas = A_LOW_K + 1e3 - median(1e3).value.scaled
    ok = (abs(hi_meas / hi_ref - 1) <= 0.02 and abs(lo_meas / lo_ref - 1) <= 0.02
          and abs(u_meas - 0.2016) <= 0.002)
    return (f"{hi_meas:.6f} vs {hi_ref:.6f}; {lo_meas:.6f} vs {lo_ref:.6f}; {u_meas:.5f}",
            "2%; 2%; 0.2016 +-0.002", ok)


def crossover_k() -> float:
    def f(k):
        return (A_HIGH_K + k) - 2.0 ** (1.0 / k) * (k - 1.0 / 3.0)

    root, _, _ = brent_root(f, 2.0, 4.0, f(2.0), f(4.0), xtol=1e-12)
    return root


def _crossover(cfg):
    kc = crossover_k()
    return f"{kc:.5f}", "3.021 +-0.01", abs(kc - 3.021) <= 0.01


def _laurent(cfg):
    bad = 0
    for k in geometric_grid(2.0, cfg.k_max, cfg.per_decade):
        nu = math.exp(median(k).value.log_natural)
        m = median(k).value.scaled
        # margins compared with the usual graze tolerance; beyond k ~ 60 the
        # partial sums agree with nu to the last bit
        up = laurent_median(k, 3) - nu
        low = laurent_median(k, 5) - nu
        if not (holds(up, m, "upper") and holds(low, m, "lower")):
            bad += 1
    return f"violations={bad}", "0", bad == 0


def _minimax_error(cfg):
    r = minimax_b(cfg, "relative")
    return f"{100 * r.max_error:.4f}%", "< 1%", r.max_error < 0.01


CLAIMS = (
    Claim("median-exactness", "percentile of solved median is 50; nu(1) = ln 2", _median_exactness),
    Claim("chen-rubin-bracket", "k - 1/3 < nu < k", _chen_rubin),
    Claim("catalog-boundhood", "catalog bounds sit on their declared side", _catalog_boundhood),
    Claim("nuLinf-percentile-band", "nu_Linf percentile in (48, 50)", _band(affine_evaluator(NU_LINF), 48.0, 50.0)),
    Claim("nuU-percentile-band", "nu_U percentile in (50, 55)", _band(affine_evaluator(NU_U), 50.0, 55.0)),
    Claim("rational1-pair-band", "tight rational N=1 pair in (49.69, 50.85)", _rational_pair),
    Claim("arctan-low-band", "arctan b=(2/pi)/P0 percentile <= 50.18",
          _band(_interp_eval(Arctan(2.0 / math.pi / P0)), None, 50.18)),
    Claim("arctan-tangent-band", "arctan b=0.205282 percentile >= 49.96",
          _band(_interp_eval(Arctan(0.205282)), 49.96, None)),
    Claim("arctan-exact1-band", "arctan exact at k=1 percentile in (49.97, 50.03)",
          _band(_interp_eval(Arctan(1.0 / math.tan(math.pi / 2.0 * P1))), 49.97, 50.03)),
    Claim("slope-at-1", "d nu / dk at k=1", _slope),
    Claim("L0-parameter", "tight B for A = exp(-gamma)", _l0),
    Claim("L1-parameters", "(A, B) tangent at k = 1", _l1),
    Claim("arctan-lower-parameter", "tight arctan lower bound b and tangency", _arctan_lower),
    Claim("minimax-rel-parameter", "arctan b minimizing max relative error", _minimax_rel),
    Claim("minimax-abs-parameter", "arctan b minimizing max absolute error", _minimax_abs),
    Claim("interpolator-properties", "P0, Pinf, P1 closed forms", _properties),
    Claim("ideal-g-slopes", "finite-difference slopes of g at 1e-4 and 1e4", _ideal_slopes),
    Claim("table2-closed-forms", "closed-form Table 2 parameters", _table2),
    Claim("nu1-not-a-bound", "nu_1 margin changes sign", _not_a_bound(affine_evaluator(NU1))),
    Claim("arctan-high-not-a-bound", "arctan b=(pi/2)Pinf margin changes sign",
          _not_a_bound(_interp_eval(Arctan(math.pi / 2.0 * PINF)))),
    Claim("rational-exact1-not-a-bound", "rational b0=1/P1-1 margin changes sign",
          _not_a_bound(_interp_eval(Rational1(1.0 / P1 - 1.0)))),
    Claim("rational2-not-a-bound", "constrained N=2 rational margin changes sign",
          _not_a_bound(_interp_eval(constrained_rational2()))),
    Claim("asymptotic-margins", "high-k and low-k margin constants", _asymptotes),
    Claim("crossover", "nu_Linf crosses k - 1/3 at k = 3.021", _crossover),
    Claim("laurent-boundhood", "Laurent sums through k^-3 / k^-5 bound nu for k >= 2", _laurent),
    Claim("minimax-rel-max-error", "max relative error of minimax arctan < 1%", _minimax_error),
)

CLAIM_IDS = tuple(c.id for c in CLAIMS)


def run_claims(ids=None, config: SearchConfig | None = None) -> list[ClaimResult]:
    config = config or SearchConfig()
    wanted = CLAIM_IDS if ids is None else tuple(ids)
    unknown = set(wanted) - set(CLAIM_IDS)
    if unknown:
        raise KeyError(f"unknown claim ids: {sorted(unknown)}")
    out = []
    for claim in CLAIMS:
        if claim.id in wanted:
            measured, threshold, ok = claim.check(config)
            out.append(ClaimResult(claim.id, claim.description, measured, threshold, bool(ok)))
    return out
