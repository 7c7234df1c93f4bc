import cmath
import math
from fractions import Fraction

import pytest

from gtasep import asymptotics, exact
from gtasep.errors import DomainError
from gtasep.model import derive_params

GRID = [(p, mu, c)
        for p in (0.1, 0.3, 0.5, 0.7, 0.9)
        for mu in (0.0, 0.2, 0.5, 0.8, 0.95)
        for c in (0.2, 0.4, 0.6, 0.8)]


# --- saddle points -----------------------------------------------------------


def test_saddle_nu_zero_is_density():
    params = derive_params(0.5, 0.5)
    for c in (0.2, 0.5, 0.8):
        z_minus, z_plus = asymptotics.saddle_points(params, c)
        assert z_minus == pytest.approx(c, abs=1e-15)
        assert math.isinf(z_plus)


def test_saddle_aggregation_limit():
    # z_pm -> 1 +- sqrt(1/(rho lam)) as lam -> inf
    lam = 1e8
    nu = 1 - 1 / lam
    p = 0.5
    params = derive_params(p, p + nu * (1 - p))
    for c in (0.3, 0.5, 0.7):
        rho = c / (1 - c)
        z_minus, z_plus = asymptotics.saddle_points(params, c)
        eps = math.sqrt(1 / (rho * lam))
        assert z_minus == pytest.approx(1 - eps, abs=3 * eps / math.sqrt(lam) + 1e-12)
        assert z_plus == pytest.approx(1 + eps, abs=3 * eps / math.sqrt(lam) + 1e-12)


def test_saddle_density_roundtrip():
    # closed-form inversion c(z_-) = (1-nu) z/(1 - nu (2-z) z)
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        z, _ = asymptotics.saddle_points(params, c)
        nu = float(params.nu)
        c_back = (1 - nu) * z / (1 - nu * (2 - z) * z)
        assert c_back == pytest.approx(c, abs=1e-12)


def test_saddle_ordering_for_positive_nu():
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        z_minus, z_plus = asymptotics.saddle_points(params, c)
        assert 0 < z_minus < 1
        if 0 < float(params.nu) < 1:
            assert z_plus > 1


def test_saddle_is_critical_point_and_admissible():
    # h'(z_-) = 0; Re h(z_-) > 0 > Re h(z_+) on a positive-nu grid
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        nu = float(params.nu)
        rho = c / (1 - c)
        z_minus, z_plus = asymptotics.saddle_points(params, c)

        def h_prime(z):
            return -nu / (1 - nu * z) + 1 / (1 - z) - rho / z

        assert abs(h_prime(z_minus)) < 1e-9
        if 0 < nu < 1:
            assert abs(h_prime(z_plus)) < 1e-9

            def h(z):
                return (cmath.log(1 - nu * z) - cmath.log(1 - z)
                        - rho * cmath.log(z))

            assert h(z_minus).real > 0 > h(z_plus).real


def test_saddle_boundary_rejected():
    params = derive_params(0.5, 0.5)
    for c in (0.0, 1.0):
        with pytest.raises(DomainError):
            asymptotics.saddle_points(params, c)


# --- flow diagram ------------------------------------------------------------


def test_flow_deterministic_head():
    params = derive_params(0.999999999, 0.0)
    # mu = 0, p -> 1: j = min(c, 1-c)
    for c in (0.2, 0.5, 0.9):
        assert asymptotics.flow_diagram(params, c) == pytest.approx(min(c, 1 - c),
                                                                    abs=1e-4)


def test_flow_backward_sequential():
    p = 0.6
    params = derive_params(p, p)
    for c in (0.25, 0.5, 0.75):
        assert asymptotics.flow_diagram(params, c) == \
            pytest.approx((1 - c) * c * p / (1 - c * p), abs=1e-15)


def test_flow_aggregation():
    params = derive_params(0.4, 1.0)
    for c in (0.25, 0.5, 0.75):
        assert asymptotics.flow_diagram(params, c) == pytest.approx(0.4 * c, abs=1e-15)


def test_flow_equals_saddle_current():
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        bundle = asymptotics.scaling_constants(params, c)
        assert bundle.j_inf == pytest.approx(asymptotics.flow_diagram(params, c),
                                             abs=1e-13)


# --- scaling constants and identities -----------------------------------------


def test_product_identity_on_grid():
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        bundle = asymptotics.scaling_constants(params, c)
        assert abs(bundle.a * bundle.b - bundle.correction) < 1e-12


def test_series_route_matches_closed_forms():
    # a and b rebuilt from the expansion coefficients h_k, r_k, s_k
    for p, mu, c in GRID[::3]:
        params = derive_params(p, mu)
        bundle = asymptotics.scaling_constants(params, c)
        mu_f, nu = float(params.mu), float(params.nu)
        rho = c / (1 - c)
        h2, h3 = bundle.h_k[2], bundle.h_k[3]
        r, s = bundle.r_k, bundle.s_k
        a_series = (mu_f - nu) / (2 * math.sqrt(2 * math.pi * h2)) * (
            (s[2] / s[0] - r[2]) / h2 + (r[1] - s[1] / s[0]) * h3 / h2 ** 2
        )
        b_series = rho * math.sqrt(2 * math.pi * h2) / (s[0] * (1 - nu))
        assert a_series == pytest.approx(bundle.a, rel=1e-11)
        assert b_series == pytest.approx(bundle.b, rel=1e-11)


def test_correction_aggregation_limit():
    # L (j_L - j_inf) -> 3 c p (1-p)/(4(1-c)) as lam -> inf
    lam = 1e8
    nu = 1 - 1 / lam
    p, c = 0.5, 0.5
    params = derive_params(p, p + nu * (1 - p))
    bundle = asymptotics.scaling_constants(params, c)
    limit = 3 * c * p * (1 - p) / (4 * (1 - c))
    assert bundle.correction == pytest.approx(limit, rel=5e-4)


def test_delta_asymptotic_tracks_exact():
    # (1-c)^{3/2}/c^2 * b^2 a / (2 sqrt(2 L)) vs the rational formula
    params_exact = derive_params(Fraction(1, 2), Fraction(3, 4))
    bundle = asymptotics.scaling_constants(params_exact.as_float(), 0.5)
    prefactor = (0.5 ** 1.5 / 0.25) * bundle.b ** 2 * bundle.a / (2 * math.sqrt(2))
    for L in (64, 128, 256, 512):
        delta = float(exact.diffusion_exact(L // 2, L - L // 2, params_exact))
        asym = prefactor / math.sqrt(L)
        assert abs(asym / delta - 1) < 0.02


# --- transfer matrix ----------------------------------------------------------


def test_transfer_nu_zero_limits():
    params = derive_params(0.5, 0.5)
    for c in (0.3, 0.5, 0.7):
        tm = asymptotics.transfer_matrix_stats(params, c, L=64, lags=(1, 2))
        assert tm.xi == 0.0
        assert tm.z_star == pytest.approx(c / (1 - c), abs=1e-13)
        assert tm.amplitude == pytest.approx(4 * c * (1 - c), abs=1e-13)
        assert tm.cov == pytest.approx((0.0, 0.0), abs=1e-15)


def test_correlation_length_divergence():
    lam = 1e8
    nu = 1 - 1 / lam
    params = derive_params(0.5, 0.5 + nu * 0.5)
    c = 0.5
    tm = asymptotics.transfer_matrix_stats(params, c, L=64)
    assert tm.xi == pytest.approx(math.sqrt(lam * c * (1 - c)), rel=1e-3)


def test_zstar_relation_and_closed_form():
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        bundle = asymptotics.scaling_constants(params, c)
        z = bundle.z_minus
        nu = float(params.nu)
        assert bundle.z_star == pytest.approx(z * (nu * z - 1) / (z - 1), abs=1e-12)
    # c = 1/2 sits exactly at the symmetric point
    params = derive_params(0.5, 0.8)
    assert asymptotics.fugacity_for_density(params, 0.5) == 1.0


def test_fugacity_density_inversion():
    for p, mu, c in GRID[::5]:
        params = derive_params(p, mu)
        z = asymptotics.fugacity_for_density(params, c)
        assert asymptotics.density_from_fugacity(params, z) == pytest.approx(c,
                                                                             abs=1e-12)


def test_dominant_eigenvector_density_element():
    # the tau-projected matrix element of the leading eigenvector is c at z*
    for p, mu, c in GRID[::7]:
        params = derive_params(p, mu)
        z = asymptotics.fugacity_for_density(params, c)
        _, _, v1, _ = asymptotics._transfer_eigensystem(z, float(params.nu))
        assert v1[1] ** 2 == pytest.approx(c, abs=1e-12)


def test_covariance_bulk_form():
    # finite-L value approaches c(1-c) e^{-k/xi} for xi << k << L
    params = derive_params(0.5, 0.9)
    c = 0.5
    tm = asymptotics.transfer_matrix_stats(params, c, L=4096, lags=(8, 16, 24))
    for k, cov in zip(tm.lags, tm.cov):
        assert cov == pytest.approx(c * (1 - c) * math.exp(-k / tm.xi), rel=1e-10)


def test_covariance_system_scale_normalization():
    # r -> 0 recovers the full variance scale as theta -> 0 and stays positive
    vals = [asymptotics.covariance_system_scale(2.0, 0.5, r)
            for r in (0.0, 0.25, 0.5)]
    assert all(v > 0 for v in vals)
    assert vals[0] > vals[1] > vals[2]


# --- KPZ invariants -------------------------------------------------------------


def test_kpz_identities_on_grid():
    for p, mu, c in GRID:
        params = derive_params(p, mu)
        rep = asymptotics.kpz_invariants(params, c)
        assert rep.residual_lambda_a < 1e-12
        assert rep.residual_a < 1e-12
        assert rep.residual_b < 1e-12


def test_kpz_nonlinearity_is_current_curvature():
    params = derive_params(0.5, 0.6)
    c = 0.45
    h = 1e-4
    curvature = (asymptotics.flow_diagram(params, c + h)
                 - 2 * asymptotics.flow_diagram(params, c)
                 + asymptotics.flow_diagram(params, c - h)) / h ** 2
    bundle = asymptotics.scaling_constants(params, c)
    assert bundle.lambda_tilde == pytest.approx(0.5 * curvature, rel=1e-5)


def test_kpz_aggregation_asymptotics():
    # A ~ 8 sqrt(lam) (c(1-c))^{3/2}, lambda~ ~ -3p(1-p)/(8(1-c)^{5/2} c^{1/2} sqrt(lam))
    p, c = 0.3, 0.4
    # the product of the two diverging/vanishing invariants stays finite:
    # lam~ A -> -3 c p (1-p)/(1-c), with O(1/sqrt(lam)) corrections
    product_limit = -3 * c * p * (1 - p) / (1 - c)
    for lam in (1e4, 1e6):
        nu = 1 - 1 / lam
        params = derive_params(p, p + nu * (1 - p))
        bundle = asymptotics.scaling_constants(params, c)
        a_pred = 8 * math.sqrt(lam) * (c * (1 - c)) ** 1.5
        lt_pred = -3 * p * (1 - p) / (8 * (1 - c) ** 2.5 * math.sqrt(c) * math.sqrt(lam))
        assert bundle.amplitude == pytest.approx(a_pred, rel=5e-3)
        assert bundle.lambda_tilde == pytest.approx(lt_pred, rel=5e-3)
        assert bundle.lambda_tilde * bundle.amplitude == \
            pytest.approx(product_limit, rel=0.6 / math.sqrt(lam))


# --- saddle forms of the finite-size quantities ----------------------------------


def test_partition_saddle_close_at_moderate_size():
    params = derive_params(Fraction(1, 2), Fraction(3, 4))
    z_exact = float(exact.partition_function(100, 100, params.nu))
    z_saddle = asymptotics.partition_function_saddle(100, 100, params.as_float())
    assert abs(z_saddle / z_exact - 1) < 0.02


def test_occupation_saddle_geometric_ratio():
    params = derive_params(0.5, 0.75)
    c = 0.5
    nu = float(params.nu)
    z, _ = asymptotics.saddle_points(params, c)
    probs = [asymptotics.occupation_saddle(n, params, c) for n in range(6)]
    for n in range(1, 5):
        assert probs[n + 1] / probs[n] == pytest.approx(z, rel=1e-12)
    # the law sums exactly to one: P(0) (1 + (1-nu) z/(1-z)) = 1
    assert probs[0] * (1 + (1 - nu) * z / (1 - z)) == pytest.approx(1.0, abs=1e-14)


def test_occupation_saddle_matches_exact_at_small_n():
    params_exact = derive_params(Fraction(1, 2), Fraction(3, 4))
    dist = exact.occupation_distribution(100, 100, params_exact.nu)
    for n in range(5):
        saddle = asymptotics.occupation_saddle(n, params_exact.as_float(), 0.5)
        assert abs(saddle / float(dist[n]) - 1) < 0.02
