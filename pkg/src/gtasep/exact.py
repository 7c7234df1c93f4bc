"""Exact finite-size results in rational arithmetic.

Everything here is evaluated with ``fractions.Fraction``: Pochhammer ratios
at negative integer parameters are catastrophically ill-conditioned in
floating point, so doubles are for display only.

The two evaluators handle terminating series exclusively.  Each guards
against a Pochhammer factor of the lower parameter vanishing inside the
summation range and, when that happens, reroutes through coefficient
extraction from the matching generating function

    (1 - t)^{-beta} (1 - x t)^{-b}                       (Gauss)
    (1 - z)^{alpha} (1 - x z)^{-beta} (1 - y z)^{-betap} (Appell)

which is the contour-integral definition and has no such singularity.  The
Appell evaluator always runs both routes and insists they agree; an index
convention slip in either one is caught on the spot.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .errors import DomainError, SingularParameterError
from .model import ModelParams

__all__ = [
    "gauss_2f1_terminating",
    "appell_f1_terminating",
    "partition_function",
    "partition_function_enumerated",
    "occupation_distribution",
    "mean_jumps",
    "diffusion_exact",
    "pochhammer",
]


def pochhammer(a: int | Fraction, k: int) -> Fraction:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), exactly."""
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


def _binom_series(b: int | Fraction, x: Fraction, order: int) -> list[Fraction]:
    """Coefficients of (1 - x t)^{-b} up to t^order: (b)_k x^k / k!."""
    coeffs = [Fraction(1)]
    term = Fraction(1)
    for k in range(order):
        term = term * (b + k) * x / (k + 1)
        coeffs.append(term)
    return coeffs


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def gauss_2f1_terminating(a: int, b: int, c: int, x) -> Fraction:
    """Terminating Gauss series 2F1(a, b; c; x) for nonpositive integer a.

    Parameters b, c are integers; x is rational.  If (c)_k vanishes before
    the numerator terminates, the value is recovered from the generating
    function of the terminating family; only when that route is singular as
    well does the call fail.
    """
    if a > 0:
        raise DomainError("first parameter must be a nonpositive integer")
    x = Fraction(x)
    n = -a
    total = Fraction(1)
    term = Fraction(1)
    singular = False
    for k in range(n):
        num = (a + k) * (b + k)
        if num == 0:
            return total  # numerator terminated early
        if c + k == 0:
            singular = True
            break
        term = term * num * x / ((c + k) * (k + 1))
        total += term
    if not singular:
        return total
    # generating-function route: 2F1(-n, b; c; x) =
    #   n!/(beta)_n * [t^n] (1 - x t)^{-b} (1 - t)^{-beta},  beta = 1 - n - c
    beta = 1 - n - c
    denom = pochhammer(beta, n)
    if denom == 0:
        raise SingularParameterError(
            f"(c)_k vanishes inside the terminating range of 2F1({a},{b};{c};x) "
            "and the generating-function route is singular too"
        )
    prod = _poly_mul(_binom_series(b, x, n), _binom_series(beta, Fraction(1), n), n)
    return prod[n] * factorial(n) / denom


def _appell_double_sum(alpha: int, beta: int, betap: int, gamma: int,
                       x: Fraction, y: Fraction) -> Fraction:
    """Direct double sum over m + k <= -alpha; None if (gamma)_{m+k} vanishes
    while the numerator is still alive."""
    n = -alpha
    total = Fraction(0)
    row = Fraction(1)  # term at (m, 0)
    for m in range(n + 1):
        term = row
        total += term
        for k in range(n - m):
            num = (alpha + m + k) * (betap + k)
            if num == 0:
                break
            if gamma + m + k == 0:
                return None
            term = term * num * y / ((gamma + m + k) * (k + 1))
            total += term
        if m < n:
            num = (alpha + m) * (beta + m)
            if num == 0:
                break
            if gamma + m == 0:
                return None
            row = row * num * x / ((gamma + m) * (m + 1))
    return total


def _appell_genfunc(alpha: int, beta: int, betap: int, gamma: int,
                    x: Fraction, y: Fraction) -> Fraction:
    """Coefficient-extraction route; None if its Pochhammer denominator vanishes.

    F1(-n; beta, betap; gamma; x, y) = n!/(-A)_n [z^n] of
    (1 - z)^A (1 - x z)^{-beta} (1 - y z)^{-betap} with A = gamma + n - 1.
    """
    n = -alpha
    A = gamma + n - 1
    denom = pochhammer(-A, n)
    if denom == 0:
        return None
    prod = _poly_mul(_binom_series(-A, Fraction(1), n), _binom_series(beta, x, n), n)
    prod = _poly_mul(prod, _binom_series(betap, y, n), n)
    return prod[n] * factorial(n) / denom


def appell_f1_terminating(alpha: int, beta: int, betap: int, gamma: int, x, y) -> Fraction:
    """Terminating Appell series F1(alpha; beta, betap; gamma; x, y).

    alpha must be a nonpositive integer.  Both evaluation routes (double sum
    and generating-function coefficient) are computed whenever they are
    nonsingular and must agree exactly.
    """
    if alpha > 0:
        raise DomainError("first parameter must be a nonpositive integer")
    x = Fraction(x)
    y = Fraction(y)
    direct = _appell_double_sum(alpha, beta, betap, gamma, x, y)
    via_gf = _appell_genfunc(alpha, beta, betap, gamma, x, y)
    if direct is None and via_gf is None:
        raise SingularParameterError(
            f"(gamma)_k vanishes inside the terminating range of "
            f"F1({alpha};{beta},{betap};{gamma};x,y) on both evaluation routes"
        )
    if direct is not None and via_gf is not None and direct != via_gf:
        raise AssertionError(
            "Appell F1 evaluation routes disagree "
            f"({alpha},{beta},{betap},{gamma}): {direct} vs {via_gf}"
        )
    return direct if direct is not None else via_gf


def partition_function(M: int, N: int, nu) -> Fraction:
    """Canonical partition function of the zero-range image.

    Z(M, N) = C(L-1, M) 2F1(-M, -N; 1-L; nu) with L = M + N; equals the
    coefficient of z^M in F(z)^N.  Z(0, N) = 1.
    """
    if N < 1 or M < 0:
        raise DomainError("need N >= 1 and M >= 0")
    if M == 0:
        return Fraction(1)
    L = M + N
    return comb(L - 1, M) * gauss_2f1_terminating(-M, -N, 1 - L, Fraction(nu))


def partition_function_enumerated(M: int, N: int, nu) -> Fraction:
    """Brute-force Z by summing f-weights over all occupation configurations.

    Exponential cost; intended as the ground-truth cross-check at small sizes.
    """
    nu = Fraction(nu)
    one_minus_nu = 1 - nu

    def weight_tail(m: int, sites: int) -> Fraction:
        if sites == 1:
            return Fraction(1) if m == 0 else one_minus_nu
        total = Fraction(0)
        for i in range(m + 1):
            w = Fraction(1) if i == 0 else one_minus_nu
            total += w * weight_tail(m - i, sites - 1)
        return total

    return weight_tail(M, N)


def occupation_distribution(M: int, N: int, nu) -> list[Fraction]:
    """Exact site-occupation probabilities P(0..M) of the zero-range image.

    P(n) = f(n) Z(M-n, N-1)/Z(M, N); the conditional law on n > 0 is the
    cluster-size distribution of the exclusion ring.  Normalizes exactly.
    """
    nu = Fraction(nu)
    if N == 1:
        return [Fraction(0)] * M + [Fraction(1)]
    Z = partition_function(M, N, nu)
    out = []
    for n in range(M + 1):
        f_n = Fraction(1) if n == 0 else 1 - nu
        out.append(f_n * partition_function(M - n, N - 1, nu) / Z)
    assert sum(out) == 1
    return out


def mean_jumps(M: int, N: int, params: ModelParams) -> Fraction:
    """Exact stationary mean number of particles jumping per time step.

    J = (mu - nu) N M / (L-1) * F1(1-M; 1-N, 1; 2-L; nu, mu)
        / 2F1(-M, -N; 1-L; nu).
    """
    if M < 1:
        raise DomainError("need at least one particle")
    if not params.is_exact:
        params = derive_exact(params)
    nu, mu = params.nu, params.mu
    L = M + N
    top = appell_f1_terminating(1 - M, 1 - N, 1, 2 - L, nu, mu)
    bottom = gauss_2f1_terminating(-M, -N, 1 - L, nu)
    return (mu - nu) * N * M * top / ((L - 1) * bottom)


def diffusion_exact(M: int, N: int, params: ModelParams) -> Fraction:
    """Exact single-particle diffusion coefficient Delta = c_2 / M^2.

    Closed form combining the Appell/Gauss values at single and doubled
    arguments; requires nu < 1 (the lam prefactor).
    """
    if M < 1:
        raise DomainError("need at least one particle")
    if not params.is_exact:
        params = derive_exact(params)
    if params.lam_infinite:
        raise DomainError("diffusion formula needs nu < 1")
    nu, mu, p, lam = params.nu, params.mu, params.p, params.lam
    L = M + N
    f1_single = appell_f1_terminating(1 - M, 1 - N, 1, 2 - L, nu, mu)
    f1_double = appell_f1_terminating(1 - 2 * M, 1 - 2 * N, 1, 2 - 2 * L, nu, mu)
    g_single = gauss_2f1_terminating(1 - M, 1 - N, 1 - L, nu)
    g_double = gauss_2f1_terminating(1 - 2 * M, 1 - 2 * N, 1 - 2 * L, nu)
    prefactor = lam * p * Fraction(comb(2 * L - 2, 2 * M - 1), comb(L - 1, M - 1) ** 2)
    bracket = (
        Fraction(2 * L - 1, 2 * (L - 1)) * f1_single * g_double / g_single ** 3
        - f1_double / g_single ** 2
    )
    return prefactor * bracket


def derive_exact(params: ModelParams) -> ModelParams:
    """Re-derive params as exact rationals; floats must be exactly representable."""
    from .model import derive_params

    return derive_params(Fraction(params.p), Fraction(params.mu))
