"""Model parameters, hopping kernel and lattice dictionaries.

The exclusion process on a ring of ``L`` sites is driven by two hop
probabilities: ``p`` for the head of a cluster and ``mu`` for each follower.
All other modules consume the derived parameters

    nu  = (mu - p) / (1 - p)
    lam = 1 / (1 - nu)        (infinite in the deterministic-aggregation limit)

together with the zero-range image on ``N = L - M`` sites, where one site of
the unbounded-occupancy lattice holds the particles of one cluster.

Parameters may be exact rationals (``fractions.Fraction``, ``int``) or floats.
Exact inputs stay exact through every formula in this module, which is what
the finite-size and series modules rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import DegenerateConfigurationError, DomainError, InvalidParameterError

Number = Union[Fraction, int, float]


def _as_exact(x: Number) -> Number:
    """Promote ints/rationals to Fraction, leave floats alone."""
    if isinstance(x, Rational):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class ModelParams:
    """Hop probabilities and derived interaction parameters.

    Attributes
    ----------
    p : Number
        Probability that the head particle of a cluster hops.
    mu : Number
        Probability that a follower hops, given everyone ahead of it hopped.
    nu : Number
        Derived interaction parameter (mu - p)/(1 - p); may be negative.
    lam : Number or None
        1/(1 - nu); ``None`` flags the infinite value at nu = 1 so that
        aggregation-limit branches are taken deliberately rather than through
        a float infinity.
    """

    p: Number
    mu: Number
    nu: Number
    lam: Number | None

    @property
    def lam_infinite(self) -> bool:
        return self.lam is None

    @property
    def is_exact(self) -> bool:
        return isinstance(self.nu, Rational)

    def as_float(self) -> "ModelParams":
        """Copy with every parameter coerced to float (lam stays None at nu=1)."""
        lam = None if self.lam is None else float(self.lam)
        return ModelParams(float(self.p), float(self.mu), float(self.nu), lam)


def derive_params(p: Number, mu: Number) -> ModelParams:
    """Build :class:`ModelParams` from the two hop probabilities.

    Exact (rational) inputs produce exact nu and lam; float inputs stay float.

    Raises
    ------
    InvalidParameterError
        If p or mu lies outside [0, 1], or p = 1 (nu undefined).
    """
    p = _as_exact(p)
    mu = _as_exact(mu)
    if not (0 <= p <= 1) or not (0 <= mu <= 1):
        raise InvalidParameterError(f"probabilities must lie in [0, 1]: p={p}, mu={mu}")
    if p == 1:
        raise InvalidParameterError("p = 1 leaves nu = (mu - p)/(1 - p) undefined")
    nu = (mu - p) / (1 - p)
    lam = None if nu == 1 else 1 / (1 - nu)
    return ModelParams(p=p, mu=mu, nu=nu, lam=lam)


@dataclass(frozen=True)
class Geometry:
    """Ring and zero-range lattice sizes with both density conventions.

    ``c = M/L`` is the exclusion density, ``rho = M/N`` the density of the
    zero-range image; they satisfy c = rho/(1 + rho) identically.
    """

    M: int
    N: int

    def __post_init__(self) -> None:
        if self.N < 1:
            raise InvalidParameterError("need at least one zero-range site (N >= 1)")
        if self.M < 0:
            raise InvalidParameterError("particle count M must be nonnegative")

    @property
    def L(self) -> int:
        return self.M + self.N

    @property
    def c(self) -> Fraction:
        return Fraction(self.M, self.L)

    @property
    def rho(self) -> Fraction:
        return Fraction(self.M, self.N)


def density_map(M: int, N: int) -> Geometry:
    """Geometry for M particles on the N-site zero-range lattice (L = M + N)."""
    return Geometry(M=M, N=N)


def hop_kernel(m: int, n: int, params: ModelParams) -> Number:
    """Probability that m of the n particles of a site (or cluster) hop.

    Three branches: nobody hops with probability 1-p; a strict leading block
    of m < n hops with p mu^(m-1) (1-mu); the whole block hops with
    p mu^(n-1).  By convention an empty site stays empty with probability 1.

    Raises
    ------
    DomainError
        If m > n or either count is negative.
    """
    if m < 0 or n < 0 or m > n:
        raise DomainError(f"need 0 <= m <= n, got m={m}, n={n}")
    one = Fraction(1) if params.is_exact else 1.0
    if n == 0:
        return one
    p, mu = params.p, params.mu
    if m == 0:
        return one - p
    if m < n:
        return p * mu ** (m - 1) * (one - mu)
    return p * mu ** (n - 1)


class WeightTriple:
    """Stationary one-site weights of the zero-range image.

    Provides the two factor sequences ``v(k)``, ``w(k)`` of the hopping
    kernel factorization phi(m|n) f(n) = v(m) w(n-m), the resulting one-site
    weight ``f(n)``, and their rational generating functions
    V(t) = (1 - nu t)/(1 - mu t), W(t) = (1 - mu t)/(1 - t),
    F(t) = V(t) W(t) = (1 - nu t)/(1 - t).
    """

    def __init__(self, params: ModelParams):
        self.params = params
        self._one = Fraction(1) if params.is_exact else 1.0

    def v(self, k: int) -> Number:
        if k < 0:
            raise DomainError("k must be nonnegative")
        if k == 0:
            return self._one
        p = self.params
        return (p.mu - p.nu) * p.mu ** (k - 1)

    def w(self, k: int) -> Number:
        if k < 0:
            raise DomainError("k must be nonnegative")
        if k == 0:
            return self._one
        return self._one - self.params.mu

    def f(self, n: int) -> Number:
        if n < 0:
            raise DomainError("n must be nonnegative")
        if n == 0:
            return self._one
        return self._one - self.params.nu

    def gen_v(self, t: Number) -> Number:
        p = self.params
        if 1 - p.mu * t == 0:
            raise DomainError("V(t) has a pole at t = 1/mu")
        return (1 - p.nu * t) / (1 - p.mu * t)

    def gen_w(self, t: Number) -> Number:
        if 1 - t == 0:
            raise DomainError("W(t) has a pole at t = 1")
        return (1 - self.params.mu * t) / (1 - t)

    def gen_f(self, t: Number) -> Number:
        if 1 - t == 0:
            raise DomainError("F(t) has a pole at t = 1")
        return (1 - self.params.nu * t) / (1 - t)


def site_weight(n: int, params: ModelParams) -> Number:
    """One-site stationary weight f(n): 1 for an empty site, 1 - nu otherwise."""
    return WeightTriple(params).f(n)


def require_active_ring(M: int, L: int) -> None:
    """Reject configurations with no cluster/hole pair (M = 0 or M = L).

    With every site occupied no cluster has an empty site ahead, so the
    update rules are undefined; an empty ring has nothing to update.
    """
    if M <= 0 or M >= L:
        raise DegenerateConfigurationError(
            f"dynamics need at least one particle and one hole (M={M}, L={L})"
        )
