import math

import pytest

from gamma_median.bounds import A_LOW_K, NU1, NU_L0, NU_L1, NU_LINF, AffineBound, affine_evaluator
from gamma_median.interpolation import P0, Arctan, Rational1, interpolated_median
from gamma_median.search import (
    CACHE_ENV,
    DEFAULT_CONFIG,
    SearchConfig,
    SearchError,
    approximation_error,
    cache_dir,
    cached_search,
    derive_L1_coefficients,
    find_tight_arctan_lower,
    find_tight_B_for_L0,
    ideal_interpolator_evaluator,
    median_slope_at_one,
    minimax_b,
    refine_around,
    run_search,
    tight_parameter,
    verify_bound_claim,
)
from gamma_median.bounds import scaled_margin
from gamma_median.interpolation import ideal_g
from gamma_median.median import median
from gamma_median.special import LN2

TOL = DEFAULT_CONFIG.param_tolerance


def interp_eval(interp):
    return lambda k: interpolated_median(interp, k)


@pytest.fixture(scope="module")
def l0():
    return find_tight_B_for_L0()


@pytest.fixture(scope="module")
def arctan_lower():
    return find_tight_arctan_lower()


def test_l0_matches_catalog(l0):
    assert l0.parameter == pytest.approx(0.4596507, abs=1e-5)
    assert l0.graze_k == pytest.approx(0.0708, abs=1e-3)
    assert l0.side == "lower"
    assert abs(l0.min_margin) <= 1e-12 * (1 + median(l0.graze_k).value.scaled)


def test_l0_tightness(l0):
    over = AffineBound(A_LOW_K, l0.parameter + 10 * TOL)
    under = AffineBound(A_LOW_K, l0.parameter - 10 * TOL)
    assert not verify_bound_claim(affine_evaluator(over), "lower").passed
    rep = verify_bound_claim(affine_evaluator(under), "lower")
    assert rep.passed
    assert all(p.scaled_margin < 0 for p in rep.points)


def test_taylor_coefficients_are_not_a_bound():
    assert not verify_bound_claim(affine_evaluator(NU1), "lower").passed


def test_arctan_lower(arctan_lower):
    assert arctan_lower.parameter == pytest.approx(0.205282, abs=1e-5)
    assert arctan_lower.graze_k == pytest.approx(0.4184, abs=1e-2)


def test_arctan_lower_tightness(arctan_lower):
    b = arctan_lower.parameter
    assert not verify_bound_claim(interp_eval(Arctan(b + 10 * TOL)), "lower").passed
    rep = verify_bound_claim(interp_eval(Arctan(b - 10 * TOL)), "lower")
    assert rep.passed
    assert all(p.scaled_margin < 0 for p in rep.points)


def test_l1_coefficients():
    a, b = derive_L1_coefficients()
    assert b == pytest.approx(0.9751836, abs=1e-5)
    assert a == pytest.approx(0.4111107, abs=1e-5)
    assert a == pytest.approx(NU_L1.A, abs=1e-5) and b == pytest.approx(NU_L1.B, abs=1e-5)
    assert a + b == pytest.approx(2 * LN2, abs=1e-12)


def test_slope_richardson():
    assert median_slope_at_one() == pytest.approx(0.9680448, abs=1e-7)


def test_minimax_relative():
    r = minimax_b(error_kind="relative")
    assert r.parameter == pytest.approx(0.21639, abs=2e-4)
    assert r.max_error < 0.01


def test_minimax_absolute_both_scales():
    scaled = minimax_b(error_kind="absolute")
    natural = minimax_b(error_kind="absolute-natural")
    # only the natural-scale error reproduces the reference value 0.21008
    assert natural.parameter == pytest.approx(0.21008, abs=2e-4)
    assert abs(scaled.parameter - 0.21008) > 2e-4


def test_minimax_rejects_unknown_kind():
    with pytest.raises(ValueError):
        minimax_b(error_kind="squared")


def test_approximation_error_kinds():
    interp = Arctan(0.21)
    k = 0.5
    m = median(k).value.scaled
    mt = interpolated_median(interp, k).scaled
    assert approximation_error(interp, k, "absolute") == pytest.approx(abs(mt - m), rel=1e-12)
    assert approximation_error(interp, k, "relative") == pytest.approx(abs(mt - m) / m, rel=1e-12)
    assert approximation_error(interp, k, "absolute-natural") == pytest.approx(abs(mt - m) * 2 ** (-1 / k), rel=1e-12)


def test_search_determinism():
    cfg = SearchConfig(per_decade=40)
    assert find_tight_B_for_L0(cfg) == find_tight_B_for_L0(cfg)
    assert minimax_b(cfg) == minimax_b(cfg)


def test_tight_parameter_bracket_checks():
    margin_for = lambda p: (lambda k: p - 1.0)  # noqa: E731  feasible iff p <= 1
    with pytest.raises(SearchError):
        tight_parameter(margin_for, "lower", 2.0, 3.0, DEFAULT_CONFIG)
    with pytest.raises(SearchError):
        tight_parameter(margin_for, "lower", 0.0, 0.5, DEFAULT_CONFIG)
    r = tight_parameter(margin_for, "lower", 0.0, 2.0, SearchConfig(per_decade=5))
    assert r.parameter == pytest.approx(1.0, abs=1e-7)


def test_verify_linf():
    rep = verify_bound_claim(affine_evaluator(NU_LINF), "lower")
    assert rep.passed
    assert rep.min_percentile > 48
    assert rep.sign_change_k is None


def test_verify_nu1_locates_sign_change():
    rep = verify_bound_claim(affine_evaluator(NU1), "lower")
    assert not rep.passed
    assert rep.sign_change_k == pytest.approx(0.1003, abs=5e-3)


def test_verify_rational_upper():
    rep = verify_bound_claim(interp_eval(Rational1(1 / P0)), "upper")
    assert rep.passed
    assert rep.max_percentile < 50.85


def test_verify_catalog_l0():
    assert verify_bound_claim(affine_evaluator(NU_L0), "lower").passed


def test_verify_ideal_interpolator_is_exact():
    rep = verify_bound_claim(ideal_interpolator_evaluator(ideal_g), "lower", SearchConfig(per_decade=10))
    assert rep.passed
    assert max(abs(p.percentile - 50) for p in rep.points) < 1e-9


def test_verify_side_validation():
    with pytest.raises(ValueError):
        verify_bound_claim(affine_evaluator(NU1), "sideways")


def test_refine_around_adds_points():
    base = [1.0, 2.0, 4.0, 8.0]
    out = refine_around(base, [3.0, 0.0, 5.0, 6.0], count=1, factor=4)
    assert out == sorted(set(out))
    assert len(out) > len(base)
    assert all(1.0 <= k <= 4.0 for k in set(out) - set(base))


def test_config_validation_and_digest():
    with pytest.raises(ValueError):
        SearchConfig(k_min=1e-2)
    with pytest.raises(ValueError):
        SearchConfig(param_tolerance=0.0)
    assert SearchConfig().digest() == DEFAULT_CONFIG.digest()
    assert SearchConfig(per_decade=50).digest() != DEFAULT_CONFIG.digest()


def test_run_search_targets():
    assert run_search("L0").parameter == pytest.approx(0.4596507, abs=1e-5)
    l1 = run_search("L1")
    assert (l1.secondary, l1.parameter) == pytest.approx((0.4111107, 0.9751836), abs=1e-5)
    with pytest.raises(ValueError):
        run_search("nope")


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert cache_dir() == tmp_path
    cfg = SearchConfig(per_decade=20)
    first = cached_search("arctan-lower", cfg)
    files = list(tmp_path.glob("search-arctan-lower-*.txt"))
    assert len(files) == 1
    assert "parameter=" in files[0].read_text()
    # a second call must come from the file, so doctor it and check
    text = files[0].read_text().replace(f"parameter={first.parameter:.17g}", "parameter=0.25")
    files[0].write_text(text)
    assert cached_search("arctan-lower", cfg).parameter == 0.25


def test_cache_ignores_corrupt_file(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    cfg = SearchConfig(per_decade=20)
    cached_search("L1", cfg)
    (path,) = tmp_path.glob("search-L1-*.txt")
    path.write_text("garbage")
    assert cached_search("L1", cfg).parameter == pytest.approx(0.9751836, abs=1e-5)


def test_cache_default_location(monkeypatch, tmp_path):
    monkeypatch.delenv(CACHE_ENV, raising=False)
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    assert cache_dir() == tmp_path / "gamma-median"


def test_cache_is_keyed_by_config(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    cached_search("L1", SearchConfig(per_decade=20))
    cached_search("L1", SearchConfig(per_decade=30))
    assert len(list(tmp_path.glob("search-L1-*.txt"))) == 2


def test_scaled_margin_sign_convention():
    k = 2.0
    assert scaled_margin(affine_evaluator(NU_LINF)(k), k) < 0
    assert math.isinf(scaled_margin(None, k))
