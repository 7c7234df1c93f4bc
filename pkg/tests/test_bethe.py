import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtasep import bethe, exact, oracle
from gtasep.errors import DegenerateSeriesError, OutOfRadiusError, ResourceCapError
from gtasep.model import derive_params
from gtasep.powerseries import series_compose, series_mul, series_revert

from conftest import PARAM_GRID


# --- generic series machinery -------------------------------------------------


@given(st.lists(st.fractions(min_value=-3, max_value=3), min_size=5, max_size=5),
       st.fractions(min_value=1, max_value=3))
@settings(max_examples=40, deadline=None)
def test_series_reversion_roundtrip(tail, lead):
    f = [Fraction(0), lead] + tail[:3]
    g = series_revert(f, 5)
    composed = series_compose(f, g, 5)
    assert composed[0] == 0 and composed[1] == 1
    assert all(c == 0 for c in composed[2:])


def test_series_mul_truncates():
    a = [Fraction(1), Fraction(2)]
    b = [Fraction(3), Fraction(4)]
    assert series_mul(a, b, 2) == [Fraction(3), Fraction(10), Fraction(8)]


def test_revert_requires_linear_term():
    with pytest.raises(DegenerateSeriesError):
        series_revert([Fraction(0), Fraction(0), Fraction(1)], 3)


# --- coefficient formulas ------------------------------------------------------


@pytest.mark.parametrize("p,mu", PARAM_GRID[:4])
def test_first_order_ratio_is_current(p, mu):
    params = derive_params(p, mu)
    for M, N in [(2, 2), (2, 3), (3, 3), (3, 4)]:
        series = bethe.series_coeffs(M, N, params, n_max=1)
        c1 = series.lambda_coeffs[1] / series.gamma_coeffs[1]
        assert c1 == exact.mean_jumps(M, N, params)


def test_gamma_coefficients_negative_for_attractive_grid():
    # 0 <= nu < 1 makes every gamma coefficient negative (checked, not proven)
    for p, mu in [(Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(3, 4)),
                  (Fraction(1, 4), Fraction(1, 2))]:
        params = derive_params(p, mu)
        assert 0 <= params.nu < 1
        series = bethe.series_coeffs(3, 3, params, n_max=5)
        assert all(c < 0 for c in series.gamma_coeffs[1:])
        assert all(c < 0 for c in series.lambda_coeffs[1:])


def test_cumulants_match_exact_formulas():
    for p, mu in PARAM_GRID[:4]:
        params = derive_params(p, mu)
        for M, N in [(2, 2), (3, 3), (4, 4)]:
            series = bethe.series_coeffs(M, N, params, n_max=2)
            c1, c2 = bethe.cumulants_from_series(series, 2)
            assert c1 == exact.mean_jumps(M, N, params)
            assert c2 / M ** 2 == exact.diffusion_exact(M, N, params)


def test_higher_cumulants_match_oracle(rational_params):
    series = bethe.series_coeffs(3, 3, rational_params, n_max=4)
    c = bethe.cumulants_from_series(series, 4)
    fd, fd_err = oracle.cumulants_fd(3, 3, rational_params, order=4)
    assert abs(float(c[2]) - fd[2]) < 1e-6
    assert abs(float(c[3]) - fd[3]) < 1e-6


def test_reversion_consistency_exact(rational_params):
    series = bethe.series_coeffs(2, 3, rational_params, n_max=5)
    inv = series_revert(series.gamma_coeffs, 5)
    back = series_compose(series.gamma_coeffs, inv, 5)
    assert back[1] == 1 and all(c == 0 for c in back[2:])


def test_resource_cap():
    params = derive_params(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(ResourceCapError):
        bethe.series_coeffs(40, 40, params, n_max=10, term_cap=10_000)


def test_order_beyond_truncation_rejected(rational_params):
    series = bethe.series_coeffs(2, 2, rational_params, n_max=2)
    with pytest.raises(Exception):
        bethe.cumulants_from_series(series, 3)


def test_degenerate_series_error():
    params = derive_params(Fraction(1, 2), Fraction(1, 4))
    series = bethe.series_coeffs(2, 2, params, n_max=2)
    broken = bethe.CgfSeries(M=2, N=2, params=params, n_max=2,
                             lambda_coeffs=series.lambda_coeffs,
                             gamma_coeffs=[Fraction(0), Fraction(0), Fraction(1)])
    with pytest.raises(DegenerateSeriesError):
        bethe.cumulants_from_series(broken, 2)


# --- parametric evaluation ------------------------------------------------------


def test_parametric_at_zero(rational_params):
    series = bethe.series_coeffs(3, 3, rational_params, n_max=4)
    assert bethe.cgf_parametric(series, 0.0) == (0.0, 0.0, 0.0, 0.0)


def test_parametric_small_b_slope():
    params = derive_params(Fraction(1, 2), Fraction(3, 4))
    series = bethe.series_coeffs(3, 3, params, n_max=12)
    j = float(exact.mean_jumps(3, 3, params))
    gamma, ln_lambda, _, _ = bethe.cgf_parametric(series, 1e-4)
    assert ln_lambda / gamma == pytest.approx(j, rel=1e-3)


def test_parametric_matches_oracle_eigenvalue():
    # convergence radius at (3, 3) limits the reachable field strength to
    # |gamma| ~ 0.03; matched to the extended-precision Perron root there
    from mpmath import mp

    params = derive_params(Fraction(1, 2), Fraction(3, 4))
    series = bethe.series_coeffs(3, 3, params, n_max=36)
    dm = oracle.build_deformed_matrix(3, 3, params)
    for b_val in (0.01, 0.02, -0.01, -0.02):
        gamma, ln_lambda, g_err, l_err = bethe.cgf_parametric(series, b_val)
        ln_oracle = float(mp.log(oracle._largest_eigenvalue_mp(dm, gamma, dps=30)))
        assert abs(ln_lambda - ln_oracle) < max(1e-8, 2 * l_err)
        assert abs(ln_lambda - ln_oracle) < 1e-8


def test_parametric_out_of_radius():
    params = derive_params(Fraction(1, 2), Fraction(3, 4))
    series = bethe.series_coeffs(3, 3, params, n_max=20)
    with pytest.raises(OutOfRadiusError):
        bethe.cgf_parametric(series, 0.5)


def test_parametric_convexity_along_curve():
    params = derive_params(Fraction(1, 2), Fraction(3, 4))
    series = bethe.series_coeffs(3, 3, params, n_max=30)
    pts = [bethe.cgf_parametric(series, b)[:2] for b in
           (-0.02, -0.015, -0.01, -0.005, 0.005, 0.01, 0.015, 0.02)]
    pts.append((0.0, 0.0))
    pts.sort()
    gammas = [p[0] for p in pts]
    lams = [p[1] for p in pts]
    # convexity: slopes nondecreasing
    slopes = [(lams[i + 1] - lams[i]) / (gammas[i + 1] - gammas[i])
              for i in range(len(pts) - 1)]
    assert all(b >= a - 1e-12 for a, b in zip(slopes, slopes[1:]))


def test_legendre_duality_numeric():
    # numerically Legendre-transform the parametric curve: convex, minimum 0
    # at the mean current
    params = derive_params(Fraction(1, 2), Fraction(3, 4))
    series = bethe.series_coeffs(3, 3, params, n_max=30)
    j = float(exact.mean_jumps(3, 3, params))
    b_grid = [b / 1000 for b in range(-22, 23, 2)]
    curve = [bethe.cgf_parametric(series, b)[:2] for b in b_grid]

    def ldf(y):
        return max(g * y - lam for g, lam in curve)

    vals = {y: ldf(y) for y in (j - 0.05, j, j + 0.05)}
    assert vals[j] == pytest.approx(0.0, abs=1e-10)
    assert vals[j - 0.05] > 0 and vals[j + 0.05] > 0
