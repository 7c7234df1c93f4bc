"""Crossover regime where the interaction scale grows like the system size
squared: Bessel-form partition function, macroscopic cluster laws, and the
crossover cumulant generating function with its universal ratio.

Everything is parametrized by theta = 2 N sqrt(rho/lam).  The generating
function is a pair of series in an auxiliary parameter; the raw terms carry
I_k(k theta) ~ e^{k theta}, so both series are reparametrized with
B~ = B e^theta and exponentially scaled Bessel values e^{-k theta} I(k theta),
turning them into absolutely convergent sums on |B~| < 1:

    G_theta = (theta^2/4) sum_k i2~(k) B~^k / k
    t       = -(theta/2)  sum_k i1~(k) B~^k / k

Cumulant extraction reverts t(B~) with mpmath coefficients at extended
precision; eliminating the exponential scale this way is an evaluation
necessity, not a change of the underlying series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, OutOfRadiusError
from .model import Geometry, ModelParams
from .special import bessel_i, bessel_i_scaled, dl_function

__all__ = [
    "theta_parameter",
    "partition_function_transition",
    "TransitionClusterLaw",
    "transition_cluster_dist",
    "transition_cgf",
    "transition_cumulants",
    "delta_theta",
    "cumulant_ratio",
    "transition_legendre",
    "gtheta_small_theta",
    "gtheta_dl_crossover",
    "current_transition",
    "KPZ_CUMULANT_RATIO",
]

# closed-form KPZ limit of the cumulant ratio c3^2/(c2 c4)
KPZ_CUMULANT_RATIO = (
    2 * (1.5 - 8 / 3 ** 1.5) ** 2 / (7.5 - 24 / math.sqrt(3) + 9 / math.sqrt(2))
)

_SMALL_THETA = 1e-6


def theta_parameter(geometry: Geometry, params: ModelParams) -> float:
    """Crossover parameter theta = 2 N sqrt(rho / lam) = 2 sqrt(M N / lam)."""
    if params.lam_infinite:
        return 0.0
    lam = float(params.lam)
    if lam <= 0:
        raise DomainError("transition parameter needs lam > 0 (nu < 1)")
    return 2.0 * math.sqrt(geometry.M * geometry.N / lam)


def partition_function_transition(M: int, theta: float) -> float:
    """Bessel-form partition function (theta/2M) I_1(theta)."""
    if theta <= 0:
        raise DomainError("theta must be positive")
    return theta / (2 * M) * bessel_i(1, theta)


@dataclass(frozen=True)
class TransitionClusterLaw:
    """Occupation / cluster-size laws on the system-size scale.

    ``p_zero``/``p_full`` are the probabilities of an empty site and of the
    single giant cluster; ``p_mid(n)`` the density of macroscopic clusters of
    n particles; ``chi_atom`` and ``chi_density`` the law of the particle
    fraction chi = n/M conditioned on occupied sites, an atom at chi = 1 plus
    a continuous part on [0, 1).
    """

    theta: float
    M: int
    N: int
    p_zero: float
    p_full: float
    p_mid: Callable[[float], float]
    chi_atom: float
    chi_density: Callable[[float], float]
    mean_cluster: float
    expected_clusters: float

    def chi_mass(self) -> float:
        """Total mass of the chi law (atom + integral); equals 1 in the limit."""
        integral, _ = quad(self.chi_density, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12,
                           limit=400)
        return self.chi_atom + integral


def transition_cluster_dist(theta: float, M: int, N: int) -> TransitionClusterLaw:
    """Bessel-form cluster laws at crossover parameter theta.

    The theta -> 0 limit (single giant cluster) is returned by a dedicated
    branch: the generic expressions are 0/0 there.
    """
    if theta < 0:
        raise DomainError("theta must be positive (theta -> 0 has a limit branch)")
    if theta < _SMALL_THETA:
        # I_1(x) -> x/2, I_0 -> 1: everything concentrates on one cluster
        return TransitionClusterLaw(
            theta=theta, M=M, N=N,
            p_zero=1.0 - 1.0 / N,
            p_full=1.0 / N,
            p_mid=lambda n: 0.0,
            chi_atom=1.0,
            chi_density=lambda x: 0.0,
            mean_cluster=float(M),
            expected_clusters=1.0,
        )
    i0 = bessel_i_scaled(0, theta)
    i1 = bessel_i_scaled(1, theta)

    def p_mid(n: float) -> float:
        if not 0 < n < M:
            raise DomainError("mid branch needs 0 < n < M")
        u = math.sqrt(1.0 - n / M)
        return (theta ** 2 / (4.0 * N * M)
                * bessel_i_scaled(1, theta * u) / (i1 * u) * math.exp(theta * (u - 1)))

    def chi_density(x: float) -> float:
        if not 0 <= x <= 1:
            return 0.0
        u = math.sqrt(1.0 - x)
        if u < 1e-8:  # I_1(theta u)/u -> theta/2
            return theta * theta / (4.0 * i0) * math.exp(-theta)
        return (theta / (2.0 * i0)
                * bessel_i_scaled(1, theta * u) / u * math.exp(theta * (u - 1)))

    return TransitionClusterLaw(
        theta=theta, M=M, N=N,
        p_zero=1.0 - theta / (2.0 * N) * i0 / i1,
        p_full=theta / (2.0 * N) / i1 * math.exp(-theta),
        p_mid=p_mid,
        chi_atom=1.0 / i0 * math.exp(-theta),
        chi_density=chi_density,
        mean_cluster=2.0 * M * i1 / (theta * i0),
        expected_clusters=theta * i0 / (2.0 * i1),
    )


def _series_coeffs(theta: float, n_terms: int) -> tuple[list[float], list[float]]:
    """Scaled-Bessel coefficients of t(B~) and G_theta(B~), index k-1 -> k."""
    t_c, g_c = [], []
    for k in range(1, n_terms + 1):
        i1 = bessel_i_scaled(1, k * theta)
        i2 = bessel_i_scaled(2, k * theta)
        t_c.append(-(theta / 2.0) * i1 / k)
        g_c.append((theta * theta / 4.0) * i2 / k)
    return t_c, g_c


_TERM_BUDGET = 200_000


def _terms_needed(b_tilde: float, tol: float = 1e-13) -> int:
    # tail of sum k^{-3/2} |B~|^k bounded by |B~|^{K+1}/(1 - |B~|)
    q = abs(b_tilde)
    if q < 1e-12:
        return 4
    n = int(math.log(tol * (1 - q)) / math.log(q)) + 2
    if n > _TERM_BUDGET:
        raise OutOfRadiusError(
            f"|B~| = {q} needs ~{n} series terms, beyond the budget {_TERM_BUDGET}"
        )
    return max(8, n)


def transition_cgf(theta: float, b_tilde: float) -> tuple[float, float]:
    """Parametric point (t, G_theta(t)) of the crossover CGF at parameter B~.

    Requires |B~| < 1 (the reparametrized convergence disc); the partial sums
    carry an explicit geometric tail bound below 1e-12.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    if abs(b_tilde) >= 1:
        raise OutOfRadiusError(f"|B~| must be < 1, got {b_tilde}")
    n_terms = _terms_needed(b_tilde)
    t_c, g_c = _series_coeffs(theta, n_terms)
    t_val = 0.0
    g_val = 0.0
    power = 1.0
    for k in range(n_terms):
        power *= b_tilde
        t_val += t_c[k] * power
        g_val += g_c[k] * power
    return t_val, g_val


def transition_cumulants(theta: float, order: int = 4, dps: int = 40) -> list[float]:
    """Rescaled cumulants c~_n = G_theta^(n)(0), n = 1..order.

    Exact series reversion of t(B~) composed into G_theta(B~), carried out on
    mpmath floats so that the order-4 elimination keeps full accuracy.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    if not 1 <= order <= 8:
        raise DomainError("supported cumulant orders are 1..8")
    from mpmath import mp

    from .powerseries import series_compose, series_revert

    with mp.workdps(dps):
        th = mp.mpf(theta)
        zero = mp.mpf(0)
        t_series = [zero]
        g_series = [zero]
        for k in range(1, order + 1):
            kt = k * th
            i1 = mp.besseli(1, kt) * mp.e ** (-kt)
            i2 = mp.besseli(2, kt) * mp.e ** (-kt)
            t_series.append(-(th / 2) * i1 / k)
            g_series.append((th * th / 4) * i2 / k)
        b_of_t = series_revert(t_series, order)
        g_of_t = series_compose(g_series, b_of_t, order)
        return [float(g_of_t[n] * mp.factorial(n)) for n in range(1, order + 1)]


def delta_theta(theta: float, p: float) -> float:
    """Single-particle diffusion coefficient across the crossover.

    Delta = p(1-p) I_1(2 theta)/I_1(theta)^2 [I_2(2 theta)/I_1(2 theta)
    - I_2(theta)/I_1(theta)], evaluated with scaled Bessel ratios (the
    exponential factors cancel identically).  Tends to p(1-p) as theta -> 0
    and to (3 p(1-p)/4) sqrt(pi/theta) for large theta.
    """
    if theta < 0:
        raise DomainError("theta must be nonnegative")
    if theta < _SMALL_THETA:
        return p * (1 - p)
    i1t = bessel_i_scaled(1, theta)
    i2t = bessel_i_scaled(2, theta)
    i1tt = bessel_i_scaled(1, 2 * theta)
    i2tt = bessel_i_scaled(2, 2 * theta)
    return p * (1 - p) * (i1tt / i1t ** 2) * (i2tt / i1tt - i2t / i1t)


def cumulant_ratio(theta: float) -> float:
    """Universal ratio R(theta) = c3^2/(c2 c4) of the crossover cumulants."""
    c = transition_cumulants(theta, order=4)
    return c[2] ** 2 / (c[1] * c[3])


def current_transition(M: int, N: int, theta: float, p: float) -> float:
    """Mean jump count J ~ M p - p(1-p) rho (theta/2) I_2(theta)/I_1(theta)."""
    if theta < _SMALL_THETA:
        return M * p
    rho = M / N
    ratio = bessel_i_scaled(2, theta) / bessel_i_scaled(1, theta)
    return M * p - p * (1 - p) * rho * (theta / 2.0) * ratio


def transition_legendre(theta: float, x: float) -> float:
    """Legendre transform of G_theta by derivative matching along B~.

    Solves dG/dt = x for B~ in (-1, 1).  The parametrization covers slopes in
    (slope(B~ -> 1), slope(B~ -> -1)) only -- a narrow band above the mean
    slope on the positive side, since the series radius cuts the branch off;
    a domain error reports the attainable range.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    edge = 0.995
    n_terms = _terms_needed(edge, tol=1e-12)
    import numpy as np

    t_c, g_c = _series_coeffs(theta, n_terms)
    t_arr = np.asarray(t_c) * np.arange(1, n_terms + 1)
    g_arr = np.asarray(g_c) * np.arange(1, n_terms + 1)

    def slope(b: float) -> float:
        powers = np.power(b, np.arange(n_terms))
        return float(g_arr @ powers) / float(t_arr @ powers)

    s_lo, s_hi = slope(edge), slope(-edge)
    lo, hi = min(s_lo, s_hi), max(s_lo, s_hi)
    if not lo < x < hi:
        raise DomainError(f"slope {x} outside attainable range ({lo}, {hi})")
    b_star = brentq(lambda b: slope(b) - x, -edge, edge, xtol=1e-14)
    t_val, g_val = transition_cgf(theta, b_star)
    return x * t_val - g_val


def gtheta_small_theta(theta: float, t: float) -> float:
    """Small-theta limit t^2/2 - theta^2 t/8 of the crossover CGF."""
    return t * t / 2.0 - theta * theta * t / 8.0


def gtheta_dl_crossover(theta: float, t: float) -> float:
    """Large-theta form -theta t/2 + (3/8) sqrt(theta/2pi) G(t sqrt(8pi/theta))."""
    if theta <= 0:
        raise DomainError("theta must be positive")
    scale = math.sqrt(8 * math.pi / theta)
    return -theta * t / 2.0 + 0.375 * math.sqrt(theta / (2 * math.pi)) * dl_function(t * scale)
