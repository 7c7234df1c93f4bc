"""Special-function evaluators: polylogarithms, modified Bessel I, and the
current large-deviation scaling function with its Legendre transform.

The polylogarithm Li_s(t) is needed along the whole parametric curve of the
large-deviation function, i.e. for t in (-inf, 1).  Evaluation is split by
argument:

* |t| <= 1/2          direct defining series (geometric ratio |t|);
* 1/2 < t < 1         expansion around t = 1 in w = ln t,
                      Li_s(e^w) = Gamma(1-s)(-w)^{s-1} + sum_k zeta(s-k) w^k/k!,
                      which converges like (|w|/2pi)^k;
* t <= -1/2           Fermi-Dirac integral
                      Li_s(-e^u) = -1/Gamma(s) int_0^inf x^{s-1}/(e^{x-u}+1) dx
                      with the substitution x = y^2 removing the endpoint
                      singularity at s = 1/2.

Supported orders are the half-integers 1/2, 3/2, 5/2 used by the scaling
functions.  Everything targets 1e-12 relative accuracy.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError

__all__ = [
    "polylog",
    "bessel_i",
    "bessel_i_scaled",
    "dl_function",
    "legendre_dl",
    "dl_domain",
    "ZETA_3_2",
]

_SUPPORTED_S = (0.5, 1.5, 2.5)
_NEAR_ONE_TERMS = 40

ZETA_3_2 = float(mpmath.zeta(1.5))


@lru_cache(maxsize=None)
def _zeta_table(s: float) -> tuple[float, ...]:
    """zeta(s - k) for k = 0..N, precomputed once per order."""
    with mpmath.mp.workdps(30):
        return tuple(float(mpmath.zeta(s - k)) for k in range(_NEAR_ONE_TERMS))


@lru_cache(maxsize=None)
def _gamma_one_minus(s: float) -> float:
    with mpmath.mp.workdps(30):
        return float(mpmath.gamma(1 - s))


def _polylog_series(s: float, t: float) -> float:
    total = 0.0
    term = t
    k = 1
    while True:
        contrib = term / k ** s
        total += contrib
        if abs(contrib) <= 1e-17 * max(abs(total), 1e-300):
            return total
        k += 1
        term *= t
        if k > 200:  # |t| <= 1/2 converges long before this
            return total


def _polylog_near_one(s: float, t: float) -> float:
    w = math.log(t)  # w in (-0.7, 0)
    total = _gamma_one_minus(s) * (-w) ** (s - 1)
    zetas = _zeta_table(s)
    wk = 1.0
    fact = 1.0
    for k in range(_NEAR_ONE_TERMS):
        total += zetas[k] * wk / fact
        wk *= w
        fact *= k + 1
    return total


def _polylog_fermi_dirac(s: float, t: float) -> float:
    u = math.log(-t)
    gamma_s = math.gamma(s)

    def integrand(y: float) -> float:
        # x = y^2, dx = 2 y dy: x^{s-1} dx -> 2 y^{2s-1} dy
        z = y * y - u
        if z > 700:
            return 2.0 * y ** (2 * s - 1) * math.exp(-z)
        return 2.0 * y ** (2 * s - 1) / (math.exp(z) + 1.0)

    split = math.sqrt(max(u, 0.0)) + 1.0
    val1, _ = quad(integrand, 0.0, split, epsabs=0.0, epsrel=1e-13, limit=200)
    val2, _ = quad(integrand, split, split + 40.0, epsabs=1e-300, epsrel=1e-13, limit=200)
    return -(val1 + val2) / gamma_s


def polylog(s: float, t: float) -> float:
    """Polylogarithm Li_s(t) for s in {1/2, 3/2, 5/2} and t < 1."""
    if s not in _SUPPORTED_S:
        raise DomainError(f"supported orders are {_SUPPORTED_S}, got s={s}")
    if not t < 1:
        raise DomainError(f"need t < 1, got t={t}")
    if t == 0:
        return 0.0
    if abs(t) <= 0.5:
        return _polylog_series(s, t)
    if t > 0.5:
        return _polylog_near_one(s, t)
    return _polylog_fermi_dirac(s, t)


# ---------------------------------------------------------------------------
# modified Bessel functions of the first kind
# ---------------------------------------------------------------------------

_ASYMPTOTIC_CUTOFF = 20.0


def _bessel_i_series(k: int, x: float) -> float:
    half = 0.5 * x
    term = half ** k / math.factorial(k)
    total = term
    m = 0
    while True:
        m += 1
        term *= half * half / (m * (m + k))
        total += term
        if term <= 1e-17 * total:
            return total


def _bessel_i_scaled_asymptotic(k: int, x: float) -> float:
    # e^{-x} I_k(x) ~ (2 pi x)^{-1/2} sum_j (-1)^j a_j(k) / x^j,
    # truncated at the smallest term (far below 1e-12 for x >= 20)
    mu4 = 4 * k * k
    total = 1.0
    term = 1.0
    prev = math.inf
    for j in range(1, 60):
        term *= -(mu4 - (2 * j - 1) ** 2) / (8 * j * x)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
    return total / math.sqrt(2 * math.pi * x)


def bessel_i_scaled(k: int, x: float) -> float:
    """Exponentially scaled modified Bessel function e^{-x} I_k(x), x >= 0."""
    if k < 0 or x < 0:
        raise DomainError("need integer order k >= 0 and x >= 0")
    if x < _ASYMPTOTIC_CUTOFF:
        return _bessel_i_series(k, x) * math.exp(-x)
    return _bessel_i_scaled_asymptotic(k, x)


def bessel_i(k: int, x: float) -> float:
    """Modified Bessel function I_k(x) for integer k >= 0 and x >= 0.

    Power series below x = 20, scaled asymptotic expansion above; overflows
    to inf (as e^x does) beyond x ~ 709 -- use :func:`bessel_i_scaled` there.
    """
    if k < 0 or x < 0:
        raise DomainError("need integer order k >= 0 and x >= 0")
    if x < _ASYMPTOTIC_CUTOFF:
        return _bessel_i_series(k, x)
    scaled = _bessel_i_scaled_asymptotic(k, x)
    if x > 709:
        return math.inf
    return scaled * math.exp(x)


# ---------------------------------------------------------------------------
# current large-deviation scaling function (parametric polylog form)
# ---------------------------------------------------------------------------
#
#   G(z) = -Li_{5/2}(t)   along   z = -Li_{3/2}(t),   t in (-inf, 1)
#
# z decreases in t, covering (-zeta(3/2), +inf); G is convex with G(0) = 0,
# G'(0) = 1.  The Legendre transform solves the stationarity condition
# G'(z) = Li_{3/2}(t)/Li_{1/2}(t) = x on the same parametrization.


def dl_domain() -> tuple[float, float]:
    """Open interval of admissible arguments of the scaling function."""
    return (-ZETA_3_2, math.inf)


def _solve_parameter(target: float, func) -> float:
    """Solve func(t) = target for t in (-inf, 1) by expanding bracket + brentq.

    ``func`` must be continuous and strictly monotone decreasing in t.
    """
    lo, hi = -1.0, 1.0 - 1e-14
    # expand the negative end until func(lo) >= target
    for _ in range(80):
        if func(lo) >= target:
            break
        lo *= 4.0
    else:
        raise DomainError(f"failed to bracket parameter for target {target}")
    if func(hi) > target:
        raise DomainError(f"target {target} unreachable: endpoint value {func(hi)}")
    return brentq(lambda t: func(t) - target, lo, hi, xtol=1e-15, rtol=8.9e-16,
                  maxiter=300)


def _solve_t_of_z(z: float) -> float:
    if z <= -ZETA_3_2:
        raise DomainError(
            f"argument {z} outside the supported interval "
            f"(-zeta(3/2), inf) = ({-ZETA_3_2}, inf)"
        )
    if z == 0:
        return 0.0
    return _solve_parameter(z, lambda t: -polylog(1.5, t))


def dl_function(z: float) -> float:
    """Large-deviation scaling function G(z) via its parametric polylog form."""
    t = _solve_t_of_z(z)
    if t == 0.0:
        return 0.0
    return -polylog(2.5, t)


def _slope(t: float) -> float:
    """G'(z) along the parametrization; equals 1 at t = 0 by the series limit."""
    if t == 0.0:
        return 1.0
    return polylog(1.5, t) / polylog(0.5, t)


def legendre_dl(x: float) -> float:
    """Legendre transform G^(x) = sup_z (x z - G(z)), for x > 0.

    Solved by derivative matching: find t with G'(z(t)) = x, then evaluate
    x z - G there.  The supremum exists exactly for x in (0, inf), the range
    of G'; the minimum value 0 is attained at x = G'(0) = 1.
    """
    if not x > 0:
        raise DomainError("Legendre transform of the scaling function needs x > 0")
    if x == 1.0:
        return 0.0
    t = _solve_parameter(x, _slope)
    z = -polylog(1.5, t)
    g = -polylog(2.5, t)
    return x * z - g
