"""Brute-force ground truth on tiny zero-range lattices.

Enumerates every occupation configuration with ``sum(n_i) = M`` on ``N``
sites, builds the (optionally e^gamma-deformed) one-step transition matrix by
expanding the product over per-site transfer counts, and extracts stationary
vectors, Perron eigenvalues, current cumulants and the simultaneous-hop
distribution.  Cost is exponential; a state-space cap keeps calls honest.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, IterationLimitError, ResourceCapError
from .exact import derive_exact
from .model import ModelParams, WeightTriple, hop_kernel

__all__ = [
    "StateSpace",
    "DeformedMatrix",
    "enumerate_states",
    "build_deformed_matrix",
    "stationary_vector",
    "stationary_vector_exact",
    "largest_eigenvalue",
    "cumulants_fd",
    "hop_distribution",
    "product_measure",
    "dump_matrix_csv",
    "dump_vector_csv",
]

DEFAULT_STATE_CAP = 20_000


def enumerate_states(M: int, N: int) -> list[tuple[int, ...]]:
    """All occupation tuples (n_1..n_N) with sum M, in lexicographic order."""
    if N < 1 or M < 0:
        raise DomainError("need N >= 1 and M >= 0")
    states: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], remaining: int, sites: int) -> None:
        if sites == 1:
            states.append(prefix + (remaining,))
            return
        for k in range(remaining + 1):
            rec(prefix + (k,), remaining - k, sites - 1)

    rec((), M, N)
    return states


@dataclass
class StateSpace:
    """Indexed configuration space of the zero-range lattice."""

    M: int
    N: int
    states: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]

    @classmethod
    def build(cls, M: int, N: int, cap: int = DEFAULT_STATE_CAP) -> "StateSpace":
        size = comb(M + N - 1, N - 1)
        if size > cap:
            raise ResourceCapError(
                f"state space has {size} configurations, exceeding the cap {cap}"
            )
        states = enumerate_states(M, N)
        return cls(M=M, N=N, states=states, index={s: i for i, s in enumerate(states)})

    def __len__(self) -> int:
        return len(self.states)


@dataclass
class DeformedMatrix:
    """One-step transition matrix with every particle jump weighted by e^gamma.

    ``transitions`` stores (target, source, base weight, jump count); the
    base weights are exact Fractions whenever the parameters are.  The float
    CSC matrix for the requested gamma is materialized lazily.
    """

    space: StateSpace
    params: ModelParams
    gamma: float
    transitions: list[tuple[int, int, Fraction | float, int]]
    _csc: sp.csc_matrix | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.space)

    def matrix(self, gamma: float | None = None) -> sp.csc_matrix:
        """Sparse float matrix at ``gamma`` (defaults to the build value)."""
        g = self.gamma if gamma is None else gamma
        if gamma is None and self._csc is not None:
            return self._csc
        n = self.size
        rows, cols, vals = [], [], []
        for tgt, src, w, jumps in self.transitions:
            rows.append(tgt)
            cols.append(src)
            vals.append(float(w) * math.exp(g * jumps))
        mat = sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
        if gamma is None:
            self._csc = mat
        return mat

    def column_sums_exact(self) -> list[Fraction]:
        """Exact column sums at gamma = 0 (stochasticity check)."""
        sums = [Fraction(0)] * self.size
        for _, src, w, _ in self.transitions:
            sums[src] += Fraction(w)
        return sums

    def matrix_mp(self, gamma, dps: int = 40):
        """Dense mpmath matrix at ``gamma`` for extended-precision eigenwork."""
        from mpmath import mp, mpf

        with mp.workdps(dps):
            n = self.size
            mat = [[mp.mpf(0)] * n for _ in range(n)]
            eg = mp.e ** mp.mpf(gamma)
            for tgt, src, w, jumps in self.transitions:
                if isinstance(w, Fraction):
                    base = mpf(w.numerator) / mpf(w.denominator)
                else:
                    base = mpf(w)
                mat[tgt][src] += base * eg ** jumps
            return mat


def build_deformed_matrix(
    M: int,
    N: int,
    params: ModelParams,
    gamma: float = 0.0,
    cap: int = DEFAULT_STATE_CAP,
) -> DeformedMatrix:
    """Enumerate all per-site transfer vectors {m_i} and assemble the matrix.

    A transfer vector moves m_i particles from site i to site i+1 (cyclic),
    each factor drawn from the hopping kernel; the jump count sum(m_i)
    carries the e^gamma deformation.
    """
    space = StateSpace.build(M, N, cap=cap)
    transitions: list[tuple[int, int, Fraction | float, int]] = []
    for src_idx, src in enumerate(space.states):
        ranges = [range(n_i + 1) for n_i in src]
        for moves in product(*ranges):
            w = None
            for m_i, n_i in zip(moves, src):
                factor = hop_kernel(m_i, n_i, params)
                w = factor if w is None else w * factor
            if w == 0:
                continue
            target = tuple(
                src[i] - moves[i] + moves[(i - 1) % N] for i in range(N)
            )
            transitions.append((space.index[target], src_idx, w, sum(moves)))
    return DeformedMatrix(space=space, params=params, gamma=gamma, transitions=transitions)


def _power_iteration(mat: sp.csc_matrix, tol: float = 1e-14,
                     max_iter: int = 2_000_000) -> tuple[float, np.ndarray]:
    n = mat.shape[0]
    v = np.full(n, 1.0 / n)
    lam = 1.0
    for _ in range(max_iter):
        w = mat @ v
        lam = w.sum() / v.sum()
        w_norm = w / np.abs(w).max()
        residual = np.abs(mat @ w_norm - lam * w_norm).max()
        v = w_norm
        if residual <= tol * max(1.0, abs(lam)):
            return lam, v / v.sum()
    raise IterationLimitError(
        f"power iteration did not reach residual {tol} in {max_iter} steps"
    )


def stationary_vector(dm: DeformedMatrix, tol: float = 1e-14) -> np.ndarray:
    """Fixed probability vector of the gamma = 0 transition matrix."""
    _, v = _power_iteration(dm.matrix(gamma=0.0), tol=tol)
    return v


def stationary_vector_exact(dm: DeformedMatrix) -> list[Fraction]:
    """Exact stationary vector at gamma = 0 via Gaussian elimination on (P - I).

    Only sensible for small state spaces; weights must be rational.
    """
    n = dm.size
    A = [[Fraction(0)] * n for _ in range(n)]
    for tgt, src, w, _ in dm.transitions:
        A[tgt][src] += Fraction(w)
    for i in range(n):
        A[i][i] -= 1
    # replace the last equation by normalization sum(pi) = 1
    A[n - 1] = [Fraction(1)] * n
    rhs = [Fraction(0)] * (n - 1) + [Fraction(1)]
    # solve A x = rhs
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / A[col][col]
        A[col] = [a * inv for a in A[col]]
        rhs[col] *= inv
        for r in range(n):
            if r != col and A[r][col] != 0:
                factor = A[r][col]
                A[r] = [a - factor * b for a, b in zip(A[r], A[col])]
                rhs[r] -= factor * rhs[col]
    return rhs


def largest_eigenvalue(dm: DeformedMatrix, gamma: float | None = None,
                       tol: float = 1e-14) -> float:
    """Perron root of the deformed matrix by power iteration."""
    lam, _ = _power_iteration(dm.matrix(gamma=gamma), tol=tol)
    return lam


def _largest_eigenvalue_mp(dm: DeformedMatrix, gamma, dps: int = 40):
    """Extended-precision Perron root (dense power iteration in mpmath)."""
    from mpmath import mp

    with mp.workdps(dps):
        mat = dm.matrix_mp(gamma, dps=dps)
        n = dm.size
        v = [mp.mpf(1) / n] * n
        tol = mp.mpf(10) ** (-(dps - 8))
        lam = mp.mpf(1)
        for _ in range(200_000):
            w = [sum(mat[i][j] * v[j] for j in range(n)) for i in range(n)]
            lam = sum(w) / sum(v)
            mx = max(abs(x) for x in w)
            v_new = [x / mx for x in w]
            resid = max(
                abs(sum(mat[i][j] * v_new[j] for j in range(n)) - lam * v_new[i])
                for i in range(n)
            )
            v = v_new
            if resid <= tol * max(1, abs(lam)):
                return lam
        raise IterationLimitError("extended-precision power iteration stalled")


def cumulants_fd(
    M: int,
    N: int,
    params: ModelParams,
    order: int = 4,
    h: float = 1e-3,
    dps: int = 40,
) -> tuple[list[float], list[float]]:
    """Scaled cumulants of the jump count from ln Lambda_0 by central differences.

    Central stencils at steps h, h/2, h/4 with two Richardson extrapolations;
    the eigenvalues are computed in extended precision so that the h^{-4}
    roundoff amplification of the fourth stencil stays harmless.  Returns
    (cumulants, error estimates) for orders 1..order.
    """
    if not 1 <= order <= 4:
        raise DomainError("supported cumulant orders are 1..4")
    from mpmath import mp

    dm = build_deformed_matrix(M, N, params, gamma=0.0)
    cache: dict = {}

    def f(g):
        if g not in cache:
            cache[g] = mp.log(_largest_eigenvalue_mp(dm, g, dps=dps))
        return cache[g]

    with mp.workdps(dps):
        hh = mp.mpf(h)

        def stencil(n: int, step):
            if n == 1:
                return (f(step) - f(-step)) / (2 * step)
            if n == 2:
                return (f(step) - 2 * f(mp.mpf(0)) + f(-step)) / step ** 2
            if n == 3:
                return (f(2 * step) - 2 * f(step) + 2 * f(-step) - f(-2 * step)) / (
                    2 * step ** 3
                )
            return (
                f(2 * step) - 4 * f(step) + 6 * f(mp.mpf(0)) - 4 * f(-step) + f(-2 * step)
            ) / step ** 4

        cumulants, errors = [], []
        for n in range(1, order + 1):
            d0, d1, d2 = stencil(n, hh), stencil(n, hh / 2), stencil(n, hh / 4)
            r0 = (4 * d1 - d0) / 3
            r1 = (4 * d2 - d1) / 3
            best = (16 * r1 - r0) / 15
            cumulants.append(float(best))
            errors.append(float(abs(best - r1)))
        return cumulants, errors


def product_measure(space: StateSpace, params: ModelParams) -> list[Fraction]:
    """Exact factorized stationary distribution prod f(n_i) / Z over states."""
    params = params if params.is_exact else derive_exact(params)
    weights = WeightTriple(params)
    raw = []
    for state in space.states:
        w = Fraction(1)
        for n_i in state:
            w *= Fraction(weights.f(n_i))
        raw.append(w)
    total = sum(raw)
    return [w / total for w in raw]


def hop_distribution(M: int, N: int, params: ModelParams,
                     cap: int = DEFAULT_STATE_CAP) -> list[Fraction]:
    """Stationary distribution of the number of particles hopping in one step.

    Exact expectation over the factorized measure of the per-configuration
    jump-count law (a product of per-site kernel polynomials); sums to one
    and its mean is the exact current.
    """
    params = params if params.is_exact else derive_exact(params)
    space = StateSpace.build(M, N, cap=cap)
    measure = product_measure(space, params)
    out = [Fraction(0)] * (M + 1)
    for state, pi in zip(space.states, measure):
        dist = [Fraction(1)]
        for n_i in state:
            site_poly = [Fraction(hop_kernel(m, n_i, params)) for m in range(n_i + 1)]
            new = [Fraction(0)] * (len(dist) + n_i)
            for i, a in enumerate(dist):
                if a == 0:
                    continue
                for j, b in enumerate(site_poly):
                    new[i + j] += a * b
            dist = new
        for k, prob in enumerate(dist):
            out[k] += pi * prob
    assert sum(out) == 1
    return out


def dump_matrix_csv(dm: DeformedMatrix, path) -> None:
    """Write the transition structure as CSV: target,source,weight,jumps.

    Weights are exact "numerator/denominator" strings in rational mode.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target", "source", "weight", "jumps"])
        for tgt, src, w, jumps in dm.transitions:
            w_str = f"{w.numerator}/{w.denominator}" if isinstance(w, Fraction) else repr(w)
            writer.writerow([tgt, src, w_str, jumps])


def dump_vector_csv(space: StateSpace, vector: Sequence, path) -> None:
    """Write a state-indexed vector as CSV: index,configuration,value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "configuration", "value"])
        for i, (state, val) in enumerate(zip(space.states, vector)):
            val_str = (
                f"{val.numerator}/{val.denominator}" if isinstance(val, Fraction) else repr(val)
            )
            writer.writerow([i, " ".join(map(str, state)), val_str])
