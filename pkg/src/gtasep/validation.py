"""Desk-scale cross-validation suite: every analytic layer checked against an
independent route in seconds.

Each check returns a :class:`CheckResult`; :func:`run_validation_suite`
aggregates them into a machine-readable report.  The suite is deterministic
for a fixed seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.stats import chi2

from . import asymptotics, bethe, exact, oracle, simulate, special, transition
from .model import Geometry, ModelParams, WeightTriple, derive_params, hop_kernel


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    elapsed_s: float = 0.0


_RATIONAL_GRID = [
    (Fraction(1, 4), Fraction(0)),
    (Fraction(1, 2), Fraction(1, 4)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(3, 4), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(9, 10)),
    (Fraction(9, 10), Fraction(1, 3)),
]


def _params_grid() -> list[ModelParams]:
    return [derive_params(p, mu) for p, mu in _RATIONAL_GRID]


def check_kernel_normalization(max_n: int = 50) -> CheckResult:
    """sum_m phi(m|n) = 1 exactly for every n on the parameter grid."""
    worst = None
    for params in _params_grid():
        for n in range(max_n + 1):
            total = sum(hop_kernel(m, n, params) for m in range(n + 1))
            if total != 1:
                worst = (float(params.p), float(params.mu), n, float(total))
    return CheckResult("kernel-normalization", worst is None,
                       {"max_n": max_n, "violation": worst})


def check_kernel_factorization(params_list: Sequence[ModelParams] | None = None,
                               max_n: int = 30) -> CheckResult:
    """phi(m|n) f(n) = v(m) w(n-m) exactly (the factorized-measure criterion)."""
    params_list = list(params_list) if params_list is not None else _params_grid()
    violation = None
    for params in params_list:
        weights = WeightTriple(params)
        for n in range(max_n + 1):
            for m in range(n + 1):
                lhs = hop_kernel(m, n, params) * weights.f(n)
                rhs = weights.v(m) * weights.w(n - m)
                if lhs != rhs:
                    violation = {"p": float(params.p), "mu": float(params.mu),
                                 "m": m, "n": n,
                                 "lhs": float(lhs), "rhs": float(rhs)}
    return CheckResult("kernel-factorization", violation is None,
                       {"max_n": max_n, "violation": violation})


def check_parameter_roundtrip() -> CheckResult:
    """mu = p + nu (1 - p) exactly on the rational grid."""
    ok = all(params.mu == params.p + params.nu * (1 - params.p)
             for params in _params_grid())
    return CheckResult("parameter-roundtrip", ok)


def check_partition_enumeration(max_total: int = 10) -> CheckResult:
    """Closed-form Z against brute-force enumeration, exact."""
    nus = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(-1, 2)]
    cases = 0
    for M in range(0, max_total):
        for N in range(1, max_total - M + 1):
            for nu in nus:
                if exact.partition_function(M, N, nu) != \
                        exact.partition_function_enumerated(M, N, nu):
                    return CheckResult("partition-enumeration", False,
                                       {"M": M, "N": N, "nu": str(nu)})
                cases += 1
    return CheckResult("partition-enumeration", True, {"cases": cases})


def check_current_triangle() -> CheckResult:
    """mean_jumps = stationary hop expectation = first series cumulant, exact."""
    geoms = [(2, 2), (2, 3), (3, 3)]
    cases = 0
    for params in _params_grid()[:4]:
        for M, N in geoms:
            j_formula = exact.mean_jumps(M, N, params)
            hops = oracle.hop_distribution(M, N, params)
            j_oracle = sum(k * prob for k, prob in enumerate(hops))
            series = bethe.series_coeffs(M, N, params, n_max=1)
            j_series = bethe.cumulants_from_series(series, 1)[0]
            if not (j_formula == j_oracle == j_series):
                return CheckResult("current-triangle", False,
                                   {"M": M, "N": N, "p": float(params.p),
                                    "mu": float(params.mu)})
            cases += 1
    return CheckResult("current-triangle", True, {"cases": cases})


def check_diffusion_triangle() -> CheckResult:
    """diffusion_exact = c2/M^2 from the series (exact) and matches the
    finite-difference oracle to 1e-6."""
    params = derive_params(Fraction(1, 2), Fraction(1, 4))
    worst_fd = 0.0
    for M, N in [(2, 2), (3, 3)]:
        delta = exact.diffusion_exact(M, N, params)
        series = bethe.series_coeffs(M, N, params, n_max=2)
        c2 = bethe.cumulants_from_series(series, 2)[1]
        if c2 / M ** 2 != delta:
            return CheckResult("diffusion-triangle", False,
                               {"M": M, "N": N, "stage": "series"})
    cums, _ = oracle.cumulants_fd(3, 3, params, order=2)
    worst_fd = abs(cums[1] / 9 - float(exact.diffusion_exact(3, 3, params)))
    return CheckResult("diffusion-triangle", worst_fd < 1e-6, {"fd_error": worst_fd})


def check_special_case_collapse() -> CheckResult:
    """Parallel/backward-sequential reductions of J, and the aggregation trend."""
    from math import comb

    detail = {}
    ok = True
    # parallel update: mu = 0, nu = -p/(1-p)
    p = Fraction(2, 5)
    params = derive_params(p, Fraction(0))
    M, N = 3, 4
    L = M + N
    nu = params.nu
    j_pu = (p / (1 - p)) * Fraction(N * M, L - 1) * \
        exact.gauss_2f1_terminating(1 - M, 1 - N, 2 - L, nu) / \
        exact.gauss_2f1_terminating(-M, -N, 1 - L, nu)
    ok &= j_pu == exact.mean_jumps(M, N, params)
    # backward-sequential: mu = p, nu = 0
    params = derive_params(p, p)
    j_bsu = p * Fraction(N * M, L - 1) * exact.gauss_2f1_terminating(1 - M, 1, 2 - L, p)
    ok &= j_bsu == exact.mean_jumps(M, N, params)
    # aggregation trend: J -> M p as nu -> 1
    p_val = Fraction(1, 2)
    nu_near = 1 - Fraction(1, 10 ** 6)
    mu_near = p_val + nu_near * (1 - p_val)
    params = derive_params(p_val, mu_near)
    j = exact.mean_jumps(3, 3, params)
    rel = abs(float(j) / (3 * float(p_val)) - 1)
    detail["da_rel"] = rel
    ok &= rel < 1e-3
    return CheckResult("special-case-collapse", bool(ok), detail)


def check_identity_grid(tol: float = 1e-12) -> CheckResult:
    """Saddle-regime identities on a 100-point (p, mu, c) grid."""
    worst = 0.0
    count = 0
    for p in (0.1, 0.3, 0.5, 0.7, 0.9):
        for mu in (0.0, 0.2, 0.5, 0.8, 0.95):
            for c in (0.2, 0.4, 0.6, 0.8):
                params = derive_params(p, mu)
                bundle = asymptotics.scaling_constants(params, c)
                kpz = asymptotics.kpz_invariants(params, c)
                z = bundle.z_minus
                nu = float(params.nu)
                z_star_rel = z * (nu * z - 1) / (z - 1)
                resid = max(
                    abs(bundle.a * bundle.b - bundle.correction),
                    kpz.residual_lambda_a,
                    kpz.residual_a,
                    kpz.residual_b,
                    abs(bundle.z_star - z_star_rel),
                    abs(asymptotics.density_from_fugacity(params, bundle.z_star) - c),
                )
                worst = max(worst, resid)
                count += 1
    return CheckResult("identity-grid", worst < tol, {"points": count, "worst": worst})


def check_chu_vandermonde() -> CheckResult:
    """Both summation identities, exact on integer grids."""
    x = Fraction(2, 7)
    for n in range(1, 13):
        for alpha in range(-3, 5):
            for beta in list(range(1, 5)) + [-n - 1, -n - 3]:
                lhs = exact.gauss_2f1_terminating(-n, -alpha, -beta - n + 1, Fraction(1))
                rhs = exact.pochhammer(beta - alpha, n) / exact.pochhammer(beta, n)
                if lhs != rhs:
                    return CheckResult("chu-vandermonde", False,
                                       {"n": n, "alpha": alpha, "beta": beta})
    for n in range(1, 11):
        for alpha in range(n + 1, n + 5):       # keep (-alpha)_n nonzero
            for betap in range(1, 4):
                c_rhs = alpha - betap - n + 1
                if 1 - n <= c_rhs <= 0:         # reduced 2F1 genuinely singular
                    continue
                lhs = exact.appell_f1_terminating(-n, 2, betap, alpha - n + 1, x,
                                                  Fraction(1))
                rhs = (exact.pochhammer(betap - alpha, n) / exact.pochhammer(-alpha, n)
                       * exact.gauss_2f1_terminating(-n, 2, alpha - betap - n + 1, x))
                if lhs != rhs:
                    return CheckResult("chu-vandermonde", False,
                                       {"n": n, "alpha": alpha, "betap": betap,
                                        "which": "generalized"})
    return CheckResult("chu-vandermonde", True)


def check_dl_shape() -> CheckResult:
    """Scaling-function anchors: G(0) = 0, G'(0) = 1, G''(0) = 2^{-3/2},
    Legendre transform convex with minimum 0 at x = 1."""
    h = 0.05

    def second_richardson(f: Callable[[float], float], x0: float, h0: float) -> float:
        def d2(step):
            return (f(x0 + step) - 2 * f(x0) + f(x0 - step)) / step ** 2
        d_h, d_h2, d_h4 = d2(h0), d2(h0 / 2), d2(h0 / 4)
        r1 = (4 * d_h2 - d_h) / 3
        r2 = (4 * d_h4 - d_h2) / 3
        return (16 * r2 - r1) / 15

    g0 = special.dl_function(0.0)
    g1 = (special.dl_function(1e-6) - special.dl_function(-1e-6)) / 2e-6
    g2 = second_richardson(special.dl_function, 0.0, h)
    target = 2 ** -1.5
    lmin = special.legendre_dl(1.0)
    l_curve = [special.legendre_dl(x) for x in (0.6, 0.8, 1.0, 1.2, 1.4)]
    convex = all(l_curve[i + 1] + l_curve[i - 1] - 2 * l_curve[i] > 0
                 for i in range(1, len(l_curve) - 1))
    nonneg = all(v >= 0 for v in l_curve)
    ok = (abs(g0) < 1e-14 and abs(g1 - 1) < 1e-6 and abs(g2 - target) < 1e-8
          and abs(lmin) < 1e-12 and convex and nonneg)
    return CheckResult("dl-shape", ok, {"G2_err": abs(g2 - target), "G1_err": abs(g1 - 1)})


def check_bessel_quadrature(tol: float = 1e-10) -> CheckResult:
    """Direct values against adaptive quadrature of the integral form.

    Compared in the exponentially scaled variable (integrand e^{x(cos phi-1)})
    so the quadrature never handles huge numbers.
    """
    worst = 0.0
    for k in (0, 1, 2):
        for x in (0.5, 5.0, 50.0):
            ref, _ = quad(
                lambda phi: math.exp(x * (math.cos(phi) - 1.0)) * math.cos(k * phi),
                0.0, 2 * math.pi, epsabs=1e-13, epsrel=1e-12, limit=400)
            ref /= 2 * math.pi
            worst = max(worst, abs(special.bessel_i_scaled(k, x) / ref - 1))
    return CheckResult("bessel-quadrature", worst < tol, {"worst_rel": worst})


def check_polylog_branches(tol: float = 1e-11) -> CheckResult:
    """Branch cross-consistency near the split points and a zeta endpoint."""
    worst = 0.0
    for s in (0.5, 1.5, 2.5):
        for t0 in (0.5, -0.5):
            f_in = special._polylog_series(s, t0)
            f_out = (special._polylog_near_one(s, t0) if t0 > 0
                     else special._polylog_fermi_dirac(s, t0))
            worst = max(worst, abs(f_in - f_out) / max(1.0, abs(f_in)))
    # endpoint trend: Li_{3/2}(1 - delta) -> zeta(3/2)
    delta = 1e-6
    li = special.polylog(1.5, 1 - delta)
    bound = 2 * math.sqrt(math.pi) * math.sqrt(-math.log1p(-delta)) * 1.2 + 10 * delta
    zeta_ok = abs(li - special.ZETA_3_2) < bound
    return CheckResult("polylog-branches", worst < tol and zeta_ok,
                       {"worst_rel": worst, "zeta_gap": abs(li - special.ZETA_3_2)})


def check_chi_normalization(tol: float = 1e-10) -> CheckResult:
    """Total mass of the crossover particle-fraction law at several theta."""
    worst = 0.0
    for theta in (0.1, 1.0, 10.0, 100.0):
        law = transition.transition_cluster_dist(theta, M=1000, N=500)
        worst = max(worst, abs(law.chi_mass() - 1.0))
    return CheckResult("chi-normalization", worst < tol, {"worst": worst})


def check_cumulant_ratio_endpoints() -> CheckResult:
    """R(theta) endpoints and the independent closed-form KPZ limit."""
    r_small = transition.cumulant_ratio(0.05)
    r_large = transition.cumulant_ratio(500.0)
    closed = transition.KPZ_CUMULANT_RATIO
    ok = (abs(r_small) < 1e-4 and abs(r_large - 0.41517) < 1e-3
          and abs(closed - 0.41517) < 5e-6)
    return CheckResult("cumulant-ratio-endpoints", ok,
                       {"R_small": r_small, "R_large": r_large, "closed_form": closed})


def check_mc_current(seed: int = 20240801) -> CheckResult:
    """Quick simulation against the exact finite-size current (4 sigma)."""
    params = derive_params(Fraction(1, 2), Fraction(1, 2))
    geom = Geometry(M=25, N=25)
    report = simulate.run_ensemble(geom, params, steps=200_000, replicas=4,
                                   warmup=2_000, seed=seed, thin=200)
    j_exact = float(exact.mean_jumps(geom.M, geom.N, params))
    dev = abs(report.j_hat - j_exact) / report.j_stderr
    return CheckResult("mc-current", dev < 4.0,
                       {"j_hat": report.j_hat, "j_exact": j_exact, "dev_sigma": dev})


def check_sampler_density(seed: int = 7) -> CheckResult:
    """Sampler density and first covariance lag against the exact measure."""
    params = derive_params(0.5, 0.75)
    c = 0.5
    tm = asymptotics.transfer_matrix_stats(params, c, L=128, lags=(1,))
    stats = simulate.stationary_ensemble_stats(128, params, tm.z_star, 3000,
                                               seed=seed, lags=(1,))
    dens, dens_err = stats["density"]
    cov1, cov1_err = stats["cov"][1]
    dev_d = abs(dens - c) / dens_err
    dev_c = abs(cov1 - tm.cov[0]) / cov1_err
    return CheckResult("sampler-density", dev_d < 4 and dev_c < 4,
                       {"dev_density_sigma": dev_d, "dev_cov_sigma": dev_c})


def check_oracle_stationarity() -> CheckResult:
    """Power-iteration fixed point equals the factorized measure; exact column
    sums; shift invariance."""
    params = derive_params(Fraction(1, 2), Fraction(1, 4))
    dm = oracle.build_deformed_matrix(3, 3, params)
    if any(s != 1 for s in dm.column_sums_exact()):
        return CheckResult("oracle-stationarity", False, {"stage": "column-sums"})
    pi = oracle.stationary_vector(dm)
    pm = oracle.product_measure(dm.space, params)
    gap = max(abs(a - float(b)) for a, b in zip(pi, pm))
    shift_ok = True
    for state, prob in zip(dm.space.states, pm):
        shifted = state[1:] + state[:1]
        shift_ok &= pm[dm.space.index[shifted]] == prob
    return CheckResult("oracle-stationarity", gap < 1e-12 and shift_ok, {"gap": gap})


def check_zrp_ring_equivalence(seed: int = 5150, steps: int = 100_000) -> CheckResult:
    """Mapped trajectories give the same per-step jump-count law (chi^2)."""
    from . import _kernels

    params = derive_params(0.5, 0.5)
    ring = simulate.evenly_spread_ring(40, 20)
    zrp = simulate.ring_to_zrp(ring)
    M = 20
    hop_ring = np.zeros(M + 1, dtype=np.int64)
    hop_zrp = np.zeros(M + 1, dtype=np.int64)
    rng1 = _kernels.init_rng(np.uint64(simulate.replica_seed(seed, 0)))
    rng2 = _kernels.init_rng(np.uint64(simulate.replica_seed(seed, 1)))
    _kernels.run_ring(ring.occ, 0.5, 0.5, rng1, steps, 1000, 0,
                      np.zeros(0, dtype=np.int64), 2,
                      np.zeros(M + 1, dtype=np.int64), np.zeros(1, dtype=np.int64),
                      hop_ring, np.zeros(0), np.zeros(1), np.zeros(2, dtype=np.int64))
    _kernels.run_zrp(zrp.occ, 0.5, 0.5, rng2, steps, 1000, hop_zrp)
    # two-sample chi^2 on bins with enough pooled mass
    mask = (hop_ring + hop_zrp) >= 20
    a, b = hop_ring[mask].astype(float), hop_zrp[mask].astype(float)
    na, nb = a.sum(), b.sum()
    pooled = (a + b) / (na + nb)
    stat = float(np.sum((a - na * pooled) ** 2 / (na * pooled))
                 + np.sum((b - nb * pooled) ** 2 / (nb * pooled)))
    dof = int(mask.sum()) - 1
    p_value = float(chi2.sf(stat, dof))
    return CheckResult("zrp-ring-equivalence", p_value > 0.001,
                       {"chi2": stat, "dof": dof, "p_value": p_value})


ALL_CHECKS: list[Callable[[], CheckResult]] = [
    check_kernel_normalization,
    check_kernel_factorization,
    check_parameter_roundtrip,
    check_partition_enumeration,
    check_current_triangle,
    check_diffusion_triangle,
    check_special_case_collapse,
    check_identity_grid,
    check_chu_vandermonde,
    check_dl_shape,
    check_bessel_quadrature,
    check_polylog_branches,
    check_chi_normalization,
    check_cumulant_ratio_endpoints,
    check_mc_current,
    check_sampler_density,
    check_oracle_stationarity,
    check_zrp_ring_equivalence,
]


def run_validation_suite(seed: int = 20240801) -> dict:
    """Run every check; returns a machine-readable report."""
    results = []
    for fn in ALL_CHECKS:
        start = time.perf_counter()
        if fn in (check_mc_current, check_zrp_ring_equivalence):
            res = fn(seed=seed)
        elif fn is check_sampler_density:
            res = fn(seed=seed % 100_000)
        else:
            res = fn()
        res.elapsed_s = time.perf_counter() - start
        results.append(res)
    return {
        "seed": seed,
        "passed": all(r.passed for r in results),
        "n_checks": len(results),
        "n_failed": sum(not r.passed for r in results),
        "checks": [
            {"name": r.name, "passed": r.passed, "elapsed_s": round(r.elapsed_s, 3),
             "detail": r.detail}
            for r in results
        ],
    }
