"""Thermodynamic-limit formulas of the saddle-point (KPZ) regime.

All quantities live at the dominant saddle z_- of

    h(z) = ln(1 - nu z) - ln(1 - z) - rho ln z,

the exponent of the contour integrals behind the partition function and the
current series.  The saddle pair solves the quadratic

    rho nu z^2 - (rho(1 + nu) + (1 - nu)) z + rho = 0,

evaluated in the cancellation-free form  D = 4 rho eps + (rho-1)^2 eps^2
(eps = 1 - nu), which passes smoothly through nu = 0 where the generic
expression is 0/0 and z_- reduces to c.

Expansion coefficients f_k = (z d/dz)^k f(z_-) of h and of the two rational
weights r(z) = z/((1-mu z)(1-nu z)), s(z) = z/((1-z)(1-nu z)) are obtained
from degree-4 Taylor series of f(z_- e^phi) in phi; the closed forms of the
appendix-level constants a, b, the 1/L current correction, the transfer
matrix dictionary z*, xi, A and the interface nonlinearity are implemented
directly and cross-checked against the series route by the identity suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import ModelParams

__all__ = [
    "ScalingBundle",
    "TransferMatrixStats",
    "KpzInvariants",
    "saddle_points",
    "flow_diagram",
    "scaling_constants",
    "transfer_matrix_stats",
    "kpz_invariants",
    "fugacity_for_density",
    "density_from_fugacity",
    "partition_function_saddle",
    "occupation_saddle",
]


def _require_open_density(c: float) -> None:
    if not 0 < c < 1:
        raise DomainError(f"density must lie strictly between 0 and 1, got {c}")


def saddle_points(params: ModelParams, c: float) -> tuple[float, float]:
    """Both saddle points (z_minus, z_plus) of h(z) at exclusion density c.

    z_minus lies in (0, 1) for every nu < 1.  At nu = 0 the second root
    escapes to infinity and is reported as ``math.inf``; for nu < 0 it is
    negative.
    """
    _require_open_density(c)
    nu = float(params.nu)
    if nu >= 1:
        raise DomainError("saddle points need nu < 1")
    rho = c / (1 - c)
    eps = 1 - nu
    b = rho * (1 + nu) + eps
    sqrt_d = math.sqrt(4 * rho * eps + (rho - 1) ** 2 * eps ** 2)
    z_minus = 2 * rho / (b + sqrt_d)
    z_plus = math.inf if nu == 0 else (b + sqrt_d) / (2 * rho * nu)
    return z_minus, z_plus


def flow_diagram(params: ModelParams, c: float) -> float:
    """Stationary exclusion current per site j(c) in the thermodynamic limit.

    Special parameter lines are dispatched to their exact reductions: mu = 0
    (parallel update), mu = p (backward-sequential), mu = 1 (deterministic
    aggregation, a freely walking single cluster).
    """
    _require_open_density(c)
    p, mu = float(params.p), float(params.mu)
    if mu == 0.0:
        return 0.5 * (1 - math.sqrt(1 - 4 * p * c * (1 - c)))
    if mu == p:
        return (1 - c) * c * p / (1 - c * p)
    if mu == 1.0:
        return c * p
    num = c * p * (1 + (1 - 2 * c) * mu) - c * p * math.sqrt(
        (1 - mu) * (1 - 4 * (1 - c) * c * (p - mu) - mu)
    )
    return num / (2 * mu + 2 * c * (p * (1 - mu) - mu))


def _log_derivatives(z0: float, factors: list[tuple[float, float]], order: int = 4) -> list[float]:
    """Taylor coefficients (by k!) of sum_i s_i ln(1 - a_i z0 e^phi) in phi."""
    # d/dphi ln(1 - a z) = -w with w = a z/(1 - a z); D w = w (1 + w)
    coeffs = [0.0] * (order + 1)
    for sign, a in factors:
        w = a * z0 / (1 - a * z0)
        coeffs[0] += sign * math.log(1 - a * z0)
        d1 = -w
        d2 = -w * (1 + w)
        d3 = -w * (1 + w) * (1 + 2 * w)
        d4 = -w * (1 + w) * (1 + 6 * w + 6 * w * w)
        for k, d in zip(range(1, 5), (d1, d2, d3, d4)):
            coeffs[k] += sign * d
    return coeffs


def _ratio_derivatives(z0: float, poles: list[float], order: int = 4) -> list[float]:
    """(z d/dz)^k of z / prod_i (1 - a_i z) at z0, for k = 0..order.

    Taylor-expand exp(L(phi)) where L = phi + ln z0 - sum ln(1 - a_i z),
    then rescale by factorials.
    """
    log_coeffs = _log_derivatives(z0, [(-1.0, a) for a in poles], order)
    # add ln z = ln z0 + phi
    lser = [log_coeffs[0] + math.log(z0), log_coeffs[1] + 1.0] + [
        log_coeffs[k] / math.factorial(k) for k in range(2, order + 1)
    ]
    # exp of the series: value * exp(sum_{k>=1} lser_k phi^k)
    value = math.exp(lser[0])
    out = [0.0] * (order + 1)
    out[0] = 1.0
    # exponentiate term by term: e^{g(phi)} with g(0)=0
    g = [0.0] + lser[1:]
    acc = [1.0] + [0.0] * order  # running power of g / factorial
    result = [1.0] + [0.0] * order
    for n in range(1, order + 1):
        new = [0.0] * (order + 1)
        for i in range(order + 1):
            if acc[i] == 0:
                continue
            for j in range(1, order + 1 - i):
                new[i + j] += acc[i] * g[j]
        acc = new
        for k in range(order + 1):
            result[k] += acc[k] / math.factorial(n)
    return [value * result[k] * math.factorial(k) for k in range(order + 1)]


def _h_derivatives(z0: float, nu: float, rho: float, order: int = 4) -> list[float]:
    """(z d/dz)^k of h(z) = ln(1-nu z) - ln(1-z) - rho ln z at z0."""
    coeffs = _log_derivatives(z0, [(1.0, nu), (-1.0, 1.0)], order)
    out = [coeffs[0] - rho * math.log(z0), coeffs[1] - rho] + list(coeffs[2:])
    return out


@dataclass(frozen=True)
class ScalingBundle:
    """Saddle data and the nonuniversal constants of the KPZ scaling forms."""

    z_minus: float
    z_plus: float
    h_k: tuple[float, ...]  # (z d/dz)^k h at z_-, k = 0..4
    r_k: tuple[float, ...]
    s_k: tuple[float, ...]
    g_k: tuple[float, ...]  # (mu - nu) * r_k, the current-integrand expansion
    j_inf: float            # exclusion current per site
    correction: float       # L (j_L - j_inf)
    a: float
    b: float
    z_star: float
    xi: float
    amplitude: float        # stationary correlator amplitude A
    lambda_tilde: float     # interface nonlinearity
    n_star: float           # occupation decay scale -1/ln(z_-)


def scaling_constants(params: ModelParams, c: float) -> ScalingBundle:
    """All saddle-regime constants at density c, with the product identity
    a * b = L (j_L - j_inf) asserted to 1e-12 on every call."""
    _require_open_density(c)
    p, mu, nu = float(params.p), float(params.mu), float(params.nu)
    if nu >= 1:
        raise DomainError("saddle-regime constants need nu < 1")
    rho = c / (1 - c)
    z, z_plus = saddle_points(params, c)

    h_k = _h_derivatives(z, nu, rho)
    r_k = _ratio_derivatives(z, [mu, nu])
    s_k = _ratio_derivatives(z, [1.0, nu])
    g_k = tuple((mu - nu) * rk for rk in r_k)

    j_inf = (mu - nu) * (1 - z) * z / ((1 - mu * z) * (1 - nu * (2 - z) * z))
    correction = (
        (1 - mu) * (mu - nu) / (1 - nu)
        * (1 - z) * z * (1 - nu * z) * (1 - mu * nu * z ** 3)
        / ((1 - mu * z) ** 3 * (1 - nu * z * z) ** 2)
    )
    a = (
        (1 - mu) * (mu - nu) / (math.sqrt(2 * math.pi) * (1 - nu) ** 1.5)
        * math.sqrt(z) * (1 - z) ** 2 * (1 - nu * z) ** 2 * (1 - mu * nu * z ** 3)
        / ((1 - mu * z) ** 3 * (1 - nu * z * z) ** 2.5)
    )
    b = math.sqrt(2 * math.pi * (1 - nu) * z * (1 - nu * z * z)) / ((1 - z) * (1 - nu * z))
    lambda_tilde = (
        -(1 - mu) * (mu - nu) / (1 - nu) ** 2
        * (1 - nu * (2 - z) * z) ** 3 * (1 - mu * nu * z ** 3)
        / ((1 - mu * z) ** 3 * (1 - nu * z * z) ** 3)
    )
    z_star = z * (nu * z - 1) / (z - 1)
    tm = transfer_matrix_stats(params, c, L=2, lags=())
    scale = max(1.0, abs(correction))
    if abs(a * b - correction) > 1e-12 * scale:
        raise AssertionError(
            f"identity a*b = L(j_L - j_inf) violated: {a * b} vs {correction}"
        )
    return ScalingBundle(
        z_minus=z, z_plus=z_plus,
        h_k=tuple(h_k), r_k=tuple(r_k), s_k=tuple(s_k), g_k=g_k,
        j_inf=j_inf, correction=correction, a=a, b=b,
        z_star=z_star, xi=tm.xi, amplitude=tm.amplitude,
        lambda_tilde=lambda_tilde, n_star=-1.0 / math.log(z),
    )


# ---------------------------------------------------------------------------
# transfer-matrix stationary state (Ising-like grand canonical measure)
# ---------------------------------------------------------------------------


def _transfer_eigensystem(z: float, nu: float):
    """Eigenvalues and orthonormal eigenvectors of T = [[1, sqrt(z(1-nu))],
    [sqrt(z(1-nu)), z]]."""
    s = math.sqrt((z + 1) ** 2 - 4 * nu * z)
    lam1 = 0.5 * (1 + z + s)
    lam2 = 0.5 * (1 + z - s)
    off = math.sqrt(z * (1 - nu))
    # eigenvector of the symmetric 2x2 for lam1: (off, lam1 - 1) normalized
    v1 = (off, lam1 - 1.0)
    n1 = math.hypot(*v1)
    v1 = (v1[0] / n1, v1[1] / n1)
    v2 = (-v1[1], v1[0])
    return lam1, lam2, v1, v2


def fugacity_for_density(params: ModelParams, c: float) -> float:
    """Fugacity z* fixing mean density c in the grand canonical measure."""
    _require_open_density(c)
    nu = float(params.nu)
    if nu >= 1:
        raise DomainError("transfer-matrix measure needs nu < 1")
    if c == 0.5:
        return 1.0
    t = math.sqrt((1 - nu) * (1 - nu * (1 - 2 * c) ** 2)) / ((1 - 2 * c) * (1 - nu))
    return 1 - 2 / (1 + t)


def density_from_fugacity(params: ModelParams, z: float) -> float:
    """Thermodynamic density c(z) = z d/dz ln lambda_1(z)."""
    if z <= 0:
        raise DomainError("fugacity must be positive")
    nu = float(params.nu)
    s = math.sqrt((z + 1) ** 2 - 4 * nu * z)
    lam1 = 0.5 * (1 + z + s)
    dlam1 = 0.5 * (1 + (z + 1 - 2 * nu) / s)
    return z * dlam1 / lam1


@dataclass(frozen=True)
class TransferMatrixStats:
    """Grand canonical stationary-state dictionary at density c on L sites."""

    z_star: float
    lambda1: float
    lambda2: float
    xi: float                   # correlation length 1/ln(lambda1/lambda2)
    amplitude: float            # A = 4 c (1-c) coth(1/(2 xi))
    cov: tuple[float, ...]      # exact finite-L covariance at the requested lags
    lags: tuple[int, ...]


def _finite_l_covariance(lam1, lam2, v1, v2, L: int, k: int) -> float:
    """Exact C(k) on the L-ring from the spectral trace formula."""
    q = lam2 / lam1
    m11 = v1[1] * v1[1]
    m22 = v2[1] * v2[1]
    m12sq = (v1[1] * v2[1]) ** 2
    qL = q ** L
    two_point = (m11 * m11 + m22 * m22 * qL + m12sq * (q ** k + q ** (L - k))) / (1 + qL)
    one_point = (m11 + m22 * qL) / (1 + qL)
    return two_point - one_point * one_point


def transfer_matrix_stats(params: ModelParams, c: float, L: int,
                          lags: tuple[int, ...] = (1, 2, 4, 8, 16, 32)) -> TransferMatrixStats:
    """Fugacity, correlation length, correlator amplitude and exact C(k).

    The covariance values use the full finite-L trace formula (both
    eigenvalues), so they are directly comparable to ring samples; for
    xi << k << L they reduce to c(1-c) e^{-k/xi}.
    """
    _require_open_density(c)
    nu = float(params.nu)
    z_star = fugacity_for_density(params, c)
    lam1, lam2, v1, v2 = _transfer_eigensystem(z_star, nu)
    if lam2 <= 0:
        xi = 0.0
    else:
        xi = 1.0 / math.log(lam1 / lam2)
    amplitude = 4 * c * (1 - c) * (lam1 + lam2) / (lam1 - lam2)
    cov = tuple(_finite_l_covariance(lam1, lam2, v1, v2, L, k) for k in lags)
    return TransferMatrixStats(
        z_star=z_star, lambda1=lam1, lambda2=lam2, xi=xi,
        amplitude=amplitude, cov=cov, lags=tuple(lags),
    )


def covariance_asymptotic(params: ModelParams, c: float, k: int) -> float:
    """Bulk covariance c(1-c) e^{-k/xi}, valid for xi << k << L."""
    stats = transfer_matrix_stats(params, c, L=2, lags=())
    if stats.xi == 0.0:
        return 0.0 if k > 0 else c * (1 - c)
    return c * (1 - c) * math.exp(-k / stats.xi)


def covariance_system_scale(theta: float, c: float, r: float) -> float:
    """Transition-regime covariance at separation r = k/L, on the system scale.

    Effective correlation length xi~ = 2c(1-c)/theta; the expression follows
    from the finite-L trace formula with q^L = e^{-1/xi~}.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    xi_t = 2 * c * (1 - c) / theta
    e1 = math.exp(-1 / xi_t)
    return ((1 - 2 * c) ** 2 * e1 / (1 + e1) ** 2
            + c * (1 - c) * (math.exp(-r / xi_t) + math.exp(-(1 - r) / xi_t)) / (1 + e1))


# ---------------------------------------------------------------------------
# KPZ dimensional invariants and their identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KpzInvariants:
    """The two dimensional invariants plus the universal-relation residuals."""

    lambda_tilde: float
    amplitude: float
    b_v: float                   # finite-size velocity correction 2ab
    residual_lambda_a: float     # |lambda~ A + 2 b_v|
    residual_a: float            # |a - sqrt(2A)|lambda~|(1-c)^{3/2}/(4 sqrt(pi))|
    residual_b: float            # |b + sgn(lambda~) sqrt(pi A/2)/(1-c)^{3/2}|


def kpz_invariants(params: ModelParams, c: float) -> KpzInvariants:
    """Interface nonlinearity, correlator amplitude, and identity report."""
    bundle = scaling_constants(params, c)
    lam_t = bundle.lambda_tilde
    A = bundle.amplitude
    b_v = 2 * bundle.a * bundle.b
    a_pred = math.sqrt(2 * A) * abs(lam_t) * (1 - c) ** 1.5 / (4 * math.sqrt(math.pi))
    sgn = -1.0 if lam_t < 0 else 1.0
    b_pred = -sgn * math.sqrt(math.pi * A / 2) / (1 - c) ** 1.5
    return KpzInvariants(
        lambda_tilde=lam_t,
        amplitude=A,
        b_v=b_v,
        residual_lambda_a=abs(lam_t * A + 2 * b_v),
        residual_a=abs(bundle.a - a_pred),
        residual_b=abs(bundle.b - b_pred),
    )


# ---------------------------------------------------------------------------
# saddle-point asymptotics of the finite-size quantities
# ---------------------------------------------------------------------------


def partition_function_saddle(M: int, N: int, params: ModelParams) -> float:
    """Leading saddle-point value exp(N h0)/sqrt(2 pi N |h2|) of Z(M, N)."""
    c = M / (M + N)
    bundle = scaling_constants(params, c)
    h0, h2 = bundle.h_k[0], bundle.h_k[2]
    return math.exp(N * h0) / math.sqrt(2 * math.pi * N * abs(h2))


def occupation_saddle(n: int, params: ModelParams, c: float) -> float:
    """Thermodynamic occupation law P(n) = f(n) z_-^n / F(z_-).

    This is the grand canonical one-site law at fugacity z_-; conditioned on
    n > 0 it is geometric with ratio z_-.  Valid for n not much larger than
    the decay scale n* = -1/ln z_-.
    """
    if n < 0:
        raise DomainError("occupation must be nonnegative")
    nu = float(params.nu)
    z, _ = saddle_points(params, c)
    inv_f = (1 - z) / (1 - nu * z)
    if n == 0:
        return inv_f
    return (1 - nu) * z ** n * inv_f
